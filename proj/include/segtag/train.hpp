#pragma once

#include "segtag/config.hpp"
#include "segtag/corpus.hpp"
#include "segtag/kfusion.hpp"
#include "segtag/retrieval.hpp"
#include "segtag/tagger.hpp"

#include <functional>
#include <vector>

namespace segtag {

struct TrainReport {
    std::vector<Scalar> epoch_losses;
};

// Stage-one supervised training: plain mean cross-entropy per position,
// AdamW with linear warm-up/decay, batches accumulated before each step.
// Builds the vocabulary from the corpus.
TaggerModel train_se(const AnnotatedCorpus& corpus, const TagSet& tags, const RunConfig& cfg,
                     Rng& rng, TrainReport* report = nullptr);

// One stage-two training instance, generated by running stage one over the
// training corpus.
struct KFTrainInstance {
    KFInput input;
    LabelSequence gold;
};

// Runs sampling + retrieval over the corpus with the trained stage-one
// model; sentences without uncertain components are skipped.
std::vector<KFTrainInstance> make_kf_instances(TaggerModel& se, const AnnotatedCorpus& corpus,
                                               const KnowledgeCorpus& knowledge,
                                               const RunConfig& cfg, Rng& rng);

// Stage-two training with the weighted loss: weight 1 on component
// positions, alpha elsewhere, knowledge/SEP/PAD rows excluded.
KnowledgeModel train_kf(TaggerModel& se, const AnnotatedCorpus& corpus,
                        const KnowledgeCorpus& knowledge, const RunConfig& cfg, Rng& rng,
                        TrainReport* report = nullptr);

}  // namespace segtag
