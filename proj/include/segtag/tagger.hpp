#pragma once

#include "segtag/nn.hpp"
#include "segtag/tagset.hpp"
#include "segtag/types.hpp"
#include "segtag/vocab.hpp"

#include <utility>
#include <vector>

namespace segtag {

struct ModelConfig {
    int d_h = 64;   // encoder hidden width
    int d_b = 32;   // bigram feature width
    int d_l = 64;   // fusion feature width
    int layers = 2;
    int heads = 4;
    int d_ff = 128;
    Scalar dropout = 0.1;
    int max_seq_len = 128;

    void validate() const;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// The stage-one character tagger: transformer encoder over character
// embeddings, left/right bigram feature layers, a linear fusion of the
// concatenated features, and a softmax emission head.
//
// Forward passes cache activations; backward_from_logits consumes them, so
// parameter updates interleave one forward with one backward. Dropout is
// active only when dropout_active is set; with it off the model is a pure
// function of (input, parameters).
class TaggerModel {
public:
    TaggerModel(ModelConfig cfg, Vocab vocab, TagSet tags, Rng& init_rng);

    // Emission probabilities, n x d_t.
    Matrix forward(const std::vector<int>& char_ids, bool dropout_active, Rng& rng);
    // Pre-softmax scores, n x d_t.
    Matrix forward_logits(const std::vector<int>& char_ids, bool dropout_active, Rng& rng);
    // Full backprop from the emission-head logit gradient.
    void backward_from_logits(const Matrix& grad_logits);

    // The individual stages, exposed both for the chained forward and for
    // direct use in tests. Each caches what its backward needs.
    Matrix encode(const std::vector<int>& char_ids, bool dropout_active, Rng& rng);
    std::pair<Matrix, Matrix> bigram_features(const Matrix& h);
    Matrix fuse(const Matrix& h, const Matrix& b1, const Matrix& b2);
    Matrix emit(const Matrix& l);

    nn::ParamRefs parameters();
    void zero_grad();

    const ModelConfig& config() const { return cfg_; }
    const Vocab& vocab() const { return vocab_; }
    const TagSet& tagset() const { return tags_; }

private:
    ModelConfig cfg_;
    Vocab vocab_;
    TagSet tags_;

    nn::Embedding char_emb_;
    nn::TransformerEncoder encoder_;
    nn::Dropout hidden_drop_;
    nn::Parameter left_boundary_, right_boundary_;  // stand-ins for h_{-1} / h_n
    nn::Linear bigram_prev_, bigram_next_, fusion_, head_;

    // caches for backward
    Matrix h_dropped_, bigram_in_prev_, bigram_in_next_, composite_;
};

// Weighted cross-entropy over emission rows (positions 0..|gold|-1 of p;
// rows past |gold| are auxiliary and excluded). Position weight is 1 inside
// the given components and alpha outside; the result is the weight-normalized
// mean. Throws UsageError when every weight is zero.
Scalar weighted_loss(const Matrix& p, const LabelSequence& gold, const TagSet& tags,
                     const std::vector<UncertainComponent>& components, Scalar alpha);

// dL/dP of weighted_loss, same shape as p (zero on excluded rows).
Matrix weighted_loss_grad_p(const Matrix& p, const LabelSequence& gold, const TagSet& tags,
                            const std::vector<UncertainComponent>& components, Scalar alpha);

// dL/dlogits when p = softmax(logits): rows (p_i - onehot_i) * w_i / sum(w).
Matrix weighted_loss_grad_logits(const Matrix& p, const LabelSequence& gold, const TagSet& tags,
                                 const std::vector<UncertainComponent>& components, Scalar alpha);

}  // namespace segtag
