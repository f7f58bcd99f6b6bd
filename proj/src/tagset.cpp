#include "segtag/tagset.hpp"

#include "segtag/types.hpp"

#include <fstream>

namespace segtag {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

char boundary_char(Boundary b) {
    switch (b) {
        case Boundary::B: return 'B';
        case Boundary::M: return 'M';
        case Boundary::E: return 'E';
        case Boundary::S: return 'S';
    }
    return '?';
}

TagSet::TagSet(std::vector<std::string> pos_tags) : pos_tags_(std::move(pos_tags)) {
    if (pos_tags_.empty()) throw DataError("tag set needs at least one POS tag");
    for (int i = 0; i < num_pos(); ++i) {
        const auto& name = pos_tags_[static_cast<std::size_t>(i)];
        if (name.empty()) throw DataError("empty POS identifier at position " + std::to_string(i));
        if (!pos_index_.emplace(name, i).second) {
            throw DataError("duplicate POS tag '" + name + "'");
        }
    }
}

TagSet TagSet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open tagset file: " + path);
    std::vector<std::string> tags;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (!line.empty()) tags.push_back(line);
    }
    return TagSet(std::move(tags));
}

int TagSet::find_pos(const std::string& name) const {
    const auto it = pos_index_.find(name);
    return it == pos_index_.end() ? -1 : it->second;
}

int TagSet::require_pos(const std::string& name) const {
    const int pos = find_pos(name);
    if (pos < 0) throw DataError("unknown POS tag '" + name + "'");
    return pos;
}

JointTag TagSet::joint_tag(int index) const {
    if (index < 0 || index >= num_joint()) {
        throw DataError("joint tag index " + std::to_string(index) + " out of range");
    }
    return JointTag{static_cast<Boundary>(index / num_pos()), index % num_pos()};
}

std::string TagSet::joint_name(JointTag tag) const {
    return std::string(1, boundary_char(tag.boundary)) + "-" + pos_name(tag.pos);
}

JointTag TagSet::parse_joint(const std::string& name) const {
    if (name.size() < 3 || name[1] != '-') throw DataError("malformed joint tag '" + name + "'");
    Boundary b;
    switch (name[0]) {
        case 'B': b = Boundary::B; break;
        case 'M': b = Boundary::M; break;
        case 'E': b = Boundary::E; break;
        case 'S': b = Boundary::S; break;
        default: throw DataError("malformed joint tag '" + name + "'");
    }
    return JointTag{b, require_pos(name.substr(2))};
}

LabelSequence encode_words(const TagSet& tags,
                           const std::vector<std::pair<std::u32string, std::string>>& words) {
    LabelSequence labels;
    for (const auto& [surface, pos_name] : words) {
        if (surface.empty()) throw DataError("empty word surface");
        const int pos = tags.require_pos(pos_name);
        if (surface.size() == 1) {
            labels.push_back({Boundary::S, pos});
        } else {
            labels.push_back({Boundary::B, pos});
            for (std::size_t i = 1; i + 1 < surface.size(); ++i) labels.push_back({Boundary::M, pos});
            labels.push_back({Boundary::E, pos});
        }
    }
    return labels;
}

std::vector<WordSpan> decode_labels(const LabelSequence& labels) {
    const int n = static_cast<int>(labels.size());
    std::vector<WordSpan> spans;
    int word_start = 0;
    int word_pos = 0;
    for (int i = 0; i < n; ++i) {
        const JointTag& tag = labels[static_cast<std::size_t>(i)];
        if (i == word_start) word_pos = tag.pos;
        const Boundary b = tag.boundary;
        bool close = (b == Boundary::E || b == Boundary::S);
        // Repair: a word may not run past an illegal transition or the end.
        if (!close) {
            close = (i + 1 == n) || !is_legal(tag, labels[static_cast<std::size_t>(i) + 1]);
        }
        if (close) {
            spans.push_back({word_start, i + 1, word_pos});
            word_start = i + 1;
        }
    }
    return spans;
}

bool is_legal(std::optional<JointTag> prev, std::optional<JointTag> next) {
    if (!prev && !next) return true;
    if (!prev) return next->boundary == Boundary::B || next->boundary == Boundary::S;
    if (!next) return prev->boundary == Boundary::E || prev->boundary == Boundary::S;
    const bool prev_ends = prev->boundary == Boundary::E || prev->boundary == Boundary::S;
    if (prev_ends) return next->boundary == Boundary::B || next->boundary == Boundary::S;
    // prev is B or M: the word continues, same POS required.
    return (next->boundary == Boundary::M || next->boundary == Boundary::E) && next->pos == prev->pos;
}

}  // namespace segtag
