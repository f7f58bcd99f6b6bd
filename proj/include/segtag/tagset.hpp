#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace segtag {

// Word-boundary markers of the BMES scheme. Multi-character words are
// labeled B M* E, single-character words S.
enum class Boundary : int { B = 0, M = 1, E = 2, S = 3 };

constexpr int kNumBoundaries = 4;

char boundary_char(Boundary b);

// A joint label: boundary marker plus an index into the owning TagSet's
// POS list.
struct JointTag {
    Boundary boundary;
    int pos;

    friend bool operator==(const JointTag&, const JointTag&) = default;
};

using LabelSequence = std::vector<JointTag>;

// A decoded word: character span [start, end) plus its POS index.
struct WordSpan {
    int start;
    int end;
    int pos;

    friend bool operator==(const WordSpan&, const WordSpan&) = default;
    friend auto operator<=>(const WordSpan&, const WordSpan&) = default;
};

// A merged character interval flagged as unreliable by the sampler.
// Components of one sentence are disjoint and sorted.
struct UncertainComponent {
    int start;
    int end;

    bool contains(int position) const { return position >= start && position < end; }

    friend bool operator==(const UncertainComponent&, const UncertainComponent&) = default;
    friend auto operator<=>(const UncertainComponent&, const UncertainComponent&) = default;
};

// The joint label space: |pos_tags| POS identifiers crossed with the four
// boundary markers. Dense joint indices are boundary-major: all B-* first
// (POS in declaration order), then M-*, E-*, S-*. Immutable once built.
class TagSet {
public:
    explicit TagSet(std::vector<std::string> pos_tags);

    // One POS identifier per line; '#' starts a comment, blank lines skipped.
    static TagSet load(const std::string& path);

    int num_pos() const { return static_cast<int>(pos_tags_.size()); }
    int num_joint() const { return kNumBoundaries * num_pos(); }

    const std::vector<std::string>& pos_tags() const { return pos_tags_; }
    const std::string& pos_name(int pos) const { return pos_tags_.at(static_cast<std::size_t>(pos)); }
    // -1 when the identifier is not in the set.
    int find_pos(const std::string& name) const;
    // Throws DataError naming the offending tag.
    int require_pos(const std::string& name) const;

    int joint_index(JointTag tag) const { return static_cast<int>(tag.boundary) * num_pos() + tag.pos; }
    JointTag joint_tag(int index) const;
    // "B-n" style round-trippable names.
    std::string joint_name(JointTag tag) const;
    JointTag parse_joint(const std::string& name) const;

    friend bool operator==(const TagSet& a, const TagSet& b) { return a.pos_tags_ == b.pos_tags_; }

private:
    std::vector<std::string> pos_tags_;
    std::unordered_map<std::string, int> pos_index_;
};

// Word-level annotation -> character-level BMES label sequence.
// Words are (surface, pos-identifier) pairs; surfaces must be non-empty and
// every POS must exist in the tag set.
LabelSequence encode_words(const TagSet& tags,
                           const std::vector<std::pair<std::u32string, std::string>>& words);

// Character labels -> word spans, greedy left to right. Illegal label
// sequences never fail: the current word is closed before any illegal
// transition and takes its POS from its first character's label. Output
// always tiles [0, n).
std::vector<WordSpan> decode_labels(const LabelSequence& labels);

// Transition legality including the start/end sentinels (nullopt).
// Start admits {B-*, S-*}; {E-*, S-*} admit the end; B/M continue a word
// with M/E of the same POS; E/S are followed by B/S of any POS.
bool is_legal(std::optional<JointTag> prev, std::optional<JointTag> next);

}  // namespace segtag
