#pragma once

#include "segtag/config.hpp"
#include "segtag/kfusion.hpp"
#include "segtag/retrieval.hpp"
#include "segtag/tagger.hpp"
#include "segtag/uncertainty.hpp"

#include <vector>

namespace segtag {

// Full two-stage inference for one sentence chunk (length within the model
// budget): stage-one sampling; if no component is uncertain the provisional
// labels are final, otherwise each component is retrieved and re-predicted
// independently, the distributions averaged (components with no retrieval
// hit contribute the stage-one emissions) and re-decoded by Viterbi.
std::vector<WordSpan> run_pipeline(TaggerModel& se, KnowledgeModel& kf,
                                   const KnowledgeCorpus& knowledge, const TransitionMask& mask,
                                   const std::u32string& sentence, const RunConfig& cfg, Rng& rng);

// Stage-one-only prediction (dropout off, Viterbi decode).
std::vector<WordSpan> predict_se(TaggerModel& se, const TransitionMask& mask,
                                 const std::u32string& sentence);

// Over-long sentences are split at punctuation (hard split as last resort),
// predicted chunk-wise, and the spans re-offset onto the original sentence.
std::vector<WordSpan> predict_sentence(TaggerModel& se, KnowledgeModel* kf,
                                       const KnowledgeCorpus* knowledge,
                                       const TransitionMask& mask, const std::u32string& sentence,
                                       const RunConfig& cfg, Rng& rng);

}  // namespace segtag
