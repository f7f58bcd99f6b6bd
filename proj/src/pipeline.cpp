#include "segtag/pipeline.hpp"

#include "segtag/corpus.hpp"
#include "segtag/viterbi.hpp"

namespace segtag {

std::vector<WordSpan> predict_se(TaggerModel& se, const TransitionMask& mask,
                                 const std::u32string& sentence) {
    if (sentence.empty()) return {};
    Rng unused(0);
    return decode_labels(viterbi(se.forward(se.vocab().encode(sentence), false, unused), mask));
}

std::vector<WordSpan> run_pipeline(TaggerModel& se, KnowledgeModel& kf,
                                   const KnowledgeCorpus& knowledge, const TransitionMask& mask,
                                   const std::u32string& sentence, const RunConfig& cfg, Rng& rng) {
    if (!(kf.tagset() == se.tagset()) || !(kf.vocab() == se.vocab())) {
        throw CompatError("pipeline: stage-one and stage-two models disagree on tag set or vocabulary");
    }
    if (sentence.empty()) return {};

    const std::vector<int> ids = se.vocab().encode(sentence);
    const SamplingReport report = sample_candidates(se, ids, mask, cfg.sampling.k, rng);
    if (report.components.empty()) return decode_labels(report.provisional);

    Rng unused(0);
    const Matrix se_emissions = se.forward(ids, false, unused);
    std::vector<Matrix> distributions;
    distributions.reserve(report.components.size());
    for (const auto& component : report.components) {
        std::u32string ktext;
        for (const auto& hit : retrieve(knowledge, sentence, component, cfg.retrieval.top_m)) {
            ktext += hit.text;
        }
        if (ktext.empty()) {
            // retrieval miss: this component contributes the stage-one rows
            distributions.push_back(se_emissions);
            continue;
        }
        const KFInput input = build_kf_input(ids, report.provisional, se.tagset(), component,
                                             se.vocab().encode(ktext), cfg.model.max_seq_len);
        distributions.push_back(kf.forward(input, false, unused));
    }
    return decode_labels(viterbi(fuse_components(distributions), mask));
}

std::vector<WordSpan> predict_sentence(TaggerModel& se, KnowledgeModel* kf,
                                       const KnowledgeCorpus* knowledge,
                                       const TransitionMask& mask, const std::u32string& sentence,
                                       const RunConfig& cfg, Rng& rng) {
    std::vector<WordSpan> all;
    int offset = 0;
    const bool fused = kf != nullptr && knowledge != nullptr;
    // stage two appends a separator, so its chunks need one spare position
    const int budget = fused ? std::max(1, cfg.model.max_seq_len - 1) : cfg.model.max_seq_len;
    for (const auto& chunk : split_raw_sentence(sentence, budget)) {
        const std::vector<WordSpan> spans = fused
                                                ? run_pipeline(se, *kf, *knowledge, mask, chunk, cfg, rng)
                                                : predict_se(se, mask, chunk);
        for (const auto& s : spans) all.push_back({s.start + offset, s.end + offset, s.pos});
        offset += static_cast<int>(chunk.size());
    }
    return all;
}

}  // namespace segtag
