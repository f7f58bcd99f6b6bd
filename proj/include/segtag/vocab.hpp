#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace segtag {

// Character vocabulary. Two reserved ids: 0 = unknown, 1 = the separator
// symbol used when appending retrieved knowledge. Real characters get ids
// from 2 on, in first-occurrence order, so building is deterministic.
class Vocab {
public:
    Vocab() = default;

    static constexpr int unk_id() { return 0; }
    static constexpr int sep_id() { return 1; }
    static constexpr int num_special = 2;

    static Vocab build(const std::vector<std::u32string>& texts, long min_freq = 1);
    static Vocab from_chars(std::vector<char32_t> chars);

    int size() const { return static_cast<int>(chars_.size()) + num_special; }
    int id(char32_t c) const;
    std::vector<int> encode(const std::u32string& text) const;
    const std::vector<char32_t>& chars() const { return chars_; }

    friend bool operator==(const Vocab& a, const Vocab& b) { return a.chars_ == b.chars_; }

private:
    std::vector<char32_t> chars_;
    std::unordered_map<char32_t, int> index_;
};

}  // namespace segtag
