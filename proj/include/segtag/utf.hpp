#pragma once

#include <string>
#include <string_view>

namespace segtag {

// UTF-8 <-> UTF-32 conversion. All corpus text is handled as code point
// sequences internally; byte strings appear only at I/O boundaries.
// Decoding throws DataError on malformed input, naming the byte offset.
std::u32string utf8_to_u32(std::string_view utf8);
std::string u32_to_utf8(std::u32string_view text);
std::string u32_to_utf8(char32_t cp);

}  // namespace segtag
