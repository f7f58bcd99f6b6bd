#include "segtag/vocab.hpp"

namespace segtag {

Vocab Vocab::build(const std::vector<std::u32string>& texts, long min_freq) {
    std::unordered_map<char32_t, long> counts;
    std::vector<char32_t> order;
    for (const auto& text : texts) {
        for (char32_t c : text) {
            if (counts[c]++ == 0) order.push_back(c);
        }
    }
    std::vector<char32_t> kept;
    kept.reserve(order.size());
    for (char32_t c : order) {
        if (counts[c] >= min_freq) kept.push_back(c);
    }
    return from_chars(std::move(kept));
}

Vocab Vocab::from_chars(std::vector<char32_t> chars) {
    Vocab v;
    v.chars_ = std::move(chars);
    for (int i = 0; i < static_cast<int>(v.chars_.size()); ++i) {
        v.index_.emplace(v.chars_[static_cast<std::size_t>(i)], i + num_special);
    }
    return v;
}

int Vocab::id(char32_t c) const {
    auto it = index_.find(c);
    return it == index_.end() ? unk_id() : it->second;
}

std::vector<int> Vocab::encode(const std::u32string& text) const {
    std::vector<int> ids;
    ids.reserve(text.size());
    for (char32_t c : text) ids.push_back(id(c));
    return ids;
}

}  // namespace segtag
