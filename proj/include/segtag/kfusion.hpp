#pragma once

#include "segtag/nn.hpp"
#include "segtag/tagger.hpp"
#include "segtag/tagset.hpp"
#include "segtag/types.hpp"
#include "segtag/vocab.hpp"

#include <vector>

namespace segtag {

// Auxiliary label channel ids: joint tags keep their dense indices, then
// MASK (masked uncertain positions) and PAD (every position past the
// original sentence, separator included).
inline int mask_label_id(const TagSet& tags) { return tags.num_joint(); }
inline int pad_label_id(const TagSet& tags) { return tags.num_joint() + 1; }
inline int num_label_symbols(const TagSet& tags) { return tags.num_joint() + 2; }

// One stage-two instance: the sentence, a separator, and the retrieved
// knowledge in the character channel, paired with the provisional labels
// (masked inside the component, padded past the sentence).
struct KFInput {
    std::vector<int> chars_ext;   // X + SEP + K as vocabulary ids
    std::vector<int> aux_labels;  // same length, label-channel ids
    int n = 0;                    // original sentence length
    UncertainComponent component{0, 0};
};

// Builds the instance. Knowledge is truncated from the right when the
// extended sequence would exceed max_seq_len; the sentence itself is never
// truncated (a sentence that alone exceeds the budget is a DataError).
KFInput build_kf_input(const std::vector<int>& sentence_ids, const LabelSequence& provisional,
                       const TagSet& tags, UncertainComponent component,
                       const std::vector<int>& knowledge_ids, int max_seq_len);

// The stage-two re-predictor: summed character and label embeddings into a
// transformer encoder with a softmax head. Prediction rows exist for the
// whole extended sequence, but only the first n rows are ever consumed; the
// loss never reads knowledge/SEP/PAD rows, so their logits get exactly zero
// gradient.
class KnowledgeModel {
public:
    KnowledgeModel(ModelConfig cfg, Vocab vocab, TagSet tags, Rng& init_rng);

    // Probability rows for the original sentence positions only (n x d_t).
    Matrix forward(const KFInput& input, bool dropout_active, Rng& rng);
    // Full logits over the extended sequence, for training and probing.
    Matrix forward_all_logits(const KFInput& input, bool dropout_active, Rng& rng);
    void backward_from_logits(const Matrix& grad_logits);

    nn::ParamRefs parameters();
    void zero_grad();

    const ModelConfig& config() const { return cfg_; }
    const Vocab& vocab() const { return vocab_; }
    const TagSet& tagset() const { return tags_; }
    long forward_calls() const { return forward_calls_; }

private:
    ModelConfig cfg_;
    Vocab vocab_;
    TagSet tags_;

    nn::Embedding char_emb_;
    nn::Embedding label_emb_;
    nn::TransformerEncoder encoder_;
    nn::Linear head_;
    long forward_calls_ = 0;
};

// Element-wise mean of per-component distributions; shapes must agree and
// the list must be non-empty. Rows stay normalized.
Matrix fuse_components(const std::vector<Matrix>& distributions);

}  // namespace segtag
