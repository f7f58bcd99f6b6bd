#include "segtag/uncertainty.hpp"

#include <algorithm>

namespace segtag {

SamplingReport sample_candidates(TaggerModel& model, const std::vector<int>& char_ids,
                                 const TransitionMask& mask, int k, Rng& rng) {
    if (k < 1) throw UsageError("sampling: k must be >= 1");
    SamplingReport report;
    report.provisional = viterbi(model.forward(char_ids, false, rng), mask);
    report.candidates.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        Rng stream = rng.fork(static_cast<std::uint64_t>(i));
        report.candidates.push_back(viterbi(model.forward(char_ids, true, stream), mask));
    }
    std::vector<std::vector<WordSpan>> candidate_spans;
    candidate_spans.reserve(report.candidates.size());
    for (const auto& c : report.candidates) candidate_spans.push_back(decode_labels(c));
    report.components = extract_components(decode_labels(report.provisional), candidate_spans);
    return report;
}

std::vector<UncertainComponent> extract_components(
    const std::vector<WordSpan>& provisional, const std::vector<std::vector<WordSpan>>& candidates) {
    const int n = require_tiling(provisional);
    std::vector<WordSpan> disputed;
    for (const auto& candidate : candidates) {
        if (require_tiling(candidate) != n) {
            throw CompatError("uncertain components: candidate tiling length differs from provisional");
        }
        for (const auto& word : candidate) {
            if (std::find(provisional.begin(), provisional.end(), word) == provisional.end()) {
                disputed.push_back(word);
            }
        }
    }
    std::sort(disputed.begin(), disputed.end());
    std::vector<UncertainComponent> merged;
    for (const auto& word : disputed) {
        // merge only on strict overlap; components that merely touch stay apart
        if (!merged.empty() && word.start < merged.back().end) {
            merged.back().end = std::max(merged.back().end, word.end);
        } else {
            merged.push_back({word.start, word.end});
        }
    }
    return merged;
}

namespace {

bool in_components(int position, const std::vector<UncertainComponent>& components) {
    for (const auto& c : components) {
        if (c.contains(position)) return true;
    }
    return false;
}

}  // namespace

void UncertaintyAccumulator::add(const LabelSequence& gold, const LabelSequence& provisional,
                                 const std::vector<UncertainComponent>& components) {
    if (gold.size() != provisional.size()) {
        throw CompatError("uncertainty stats: gold and provisional lengths differ");
    }
    const auto gold_spans = decode_labels(gold);
    const auto pred_spans = decode_labels(provisional);
    plain_ += count_matches(gold_spans, pred_spans);

    // oracle: gold labels substituted inside every component
    LabelSequence repaired = provisional;
    for (std::size_t i = 0; i < repaired.size(); ++i) {
        if (in_components(static_cast<int>(i), components)) repaired[i] = gold[i];
    }
    oracle_ += count_matches(gold_spans, decode_labels(repaired));

    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool hit = provisional[i] == gold[i];
        if (in_components(static_cast<int>(i), components)) {
            ++uncertain_total_;
            uncertain_correct_ += hit ? 1 : 0;
        } else {
            ++certain_total_;
            certain_correct_ += hit ? 1 : 0;
        }
    }
}

UncertaintyStats UncertaintyAccumulator::finish() const {
    UncertaintyStats stats;
    const EvalReport plain = report_from_counts(plain_);
    const EvalReport oracle = report_from_counts(oracle_);
    stats.cws_f1 = plain.cws_f1;
    stats.pos_f1 = plain.pos_f1;
    stats.oracle_cws_f1 = oracle.cws_f1;
    stats.oracle_pos_f1 = oracle.pos_f1;
    if (uncertain_total_ > 0) {
        stats.acc_uncertain = static_cast<double>(uncertain_correct_) / static_cast<double>(uncertain_total_);
    }
    if (certain_total_ > 0) {
        stats.acc_certain = static_cast<double>(certain_correct_) / static_cast<double>(certain_total_);
    }
    return stats;
}

UncertaintyStats uncertainty_stats(const LabelSequence& gold, const LabelSequence& provisional,
                                   const std::vector<UncertainComponent>& components) {
    UncertaintyAccumulator acc;
    acc.add(gold, provisional, components);
    return acc.finish();
}

}  // namespace segtag
