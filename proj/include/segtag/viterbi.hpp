#pragma once

#include "segtag/tagset.hpp"
#include "segtag/types.hpp"

#include <vector>

namespace segtag {

// Dense legality tables (transition plus start/end vectors) derived from
// is_legal over a tag set. Transitions carry no learned weights: a step is
// either free or forbidden.
class TransitionMask {
public:
    explicit TransitionMask(TagSet tags);

    int num_tags() const { return num_tags_; }
    const TagSet& tagset() const { return tags_; }

    bool allowed(int prev, int next) const {
        return allowed_[static_cast<std::size_t>(prev) * static_cast<std::size_t>(num_tags_) +
                        static_cast<std::size_t>(next)] != 0;
    }
    bool start_ok(int tag) const { return start_[static_cast<std::size_t>(tag)] != 0; }
    bool end_ok(int tag) const { return end_[static_cast<std::size_t>(tag)] != 0; }

private:
    TagSet tags_;
    int num_tags_;
    std::vector<unsigned char> allowed_, start_, end_;
};

// Best legal label sequence under sum of log emissions. Emissions are
// clamped to 1e-12 before the log; ties break toward the lowest tag index.
// n = 0 yields an empty sequence.
LabelSequence viterbi(const Matrix& emissions, const TransitionMask& mask);

// Top-k legal sequences by score, descending; returns all legal sequences
// when fewer than k exist. Diagnostic utility.
std::vector<LabelSequence> viterbi_k_paths(const Matrix& emissions, const TransitionMask& mask,
                                           int k);

}  // namespace segtag
