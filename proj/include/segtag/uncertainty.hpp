#pragma once

#include "segtag/evaluate.hpp"
#include "segtag/tagger.hpp"
#include "segtag/tagset.hpp"
#include "segtag/viterbi.hpp"

#include <optional>
#include <vector>

namespace segtag {

struct SamplingReport {
    LabelSequence provisional;              // dropout-off prediction
    std::vector<LabelSequence> candidates;  // k stochastic predictions
    std::vector<UncertainComponent> components;
};

// Runs one deterministic pass plus k dropout-active passes through the
// model, Viterbi-decoding each, and merges word-set disagreements into
// uncertain components. Candidate passes draw from independent streams
// forked off rng, so a fixed seed reproduces the report bit for bit.
SamplingReport sample_candidates(TaggerModel& model, const std::vector<int>& char_ids,
                                 const TransitionMask& mask, int k, Rng& rng);

// Words present in any candidate tiling but not in the provisional tiling
// (identity = start, end, POS), merged while strictly overlapping. Adjacent
// intervals stay separate. All tilings must cover the same [0, n).
std::vector<UncertainComponent> extract_components(
    const std::vector<WordSpan>& provisional, const std::vector<std::vector<WordSpan>>& candidates);

struct UncertaintyStats {
    double cws_f1 = 0;
    double pos_f1 = 0;
    double oracle_cws_f1 = 0;  // after replacing labels inside components with gold
    double oracle_pos_f1 = 0;
    std::optional<double> acc_uncertain;  // per-character label accuracy inside components
    std::optional<double> acc_certain;    // ... outside components
};

// Corpus-level aggregation: feed one sentence at a time, then finish().
// Accuracies are absent when no character fell in (or out of) a component.
class UncertaintyAccumulator {
public:
    void add(const LabelSequence& gold, const LabelSequence& provisional,
             const std::vector<UncertainComponent>& components);
    UncertaintyStats finish() const;

private:
    EvalCounts plain_, oracle_;
    long uncertain_correct_ = 0, uncertain_total_ = 0;
    long certain_correct_ = 0, certain_total_ = 0;
};

UncertaintyStats uncertainty_stats(const LabelSequence& gold, const LabelSequence& provisional,
                                   const std::vector<UncertainComponent>& components);

}  // namespace segtag
