#include "segtag/tagger.hpp"

#include "segtag/numeric.hpp"

#include <cmath>

namespace segtag {

void ModelConfig::validate() const {
    if (d_h <= 0 || d_b <= 0 || d_l <= 0 || layers <= 0 || heads <= 0 || d_ff <= 0 || max_seq_len <= 0) {
        throw UsageError("model dimensions must be positive");
    }
    if (d_h % heads != 0) {
        throw UsageError("d_h " + std::to_string(d_h) + " must be divisible by heads " + std::to_string(heads));
    }
    if (dropout < 0.0 || dropout >= 1.0) throw UsageError("dropout must lie in [0, 1)");
}

namespace {

ModelConfig validated(ModelConfig cfg) {
    cfg.validate();
    return cfg;
}

}  // namespace

TaggerModel::TaggerModel(ModelConfig cfg, Vocab vocab, TagSet tags, Rng& init_rng)
    : cfg_(validated(cfg)),
      vocab_(std::move(vocab)),
      tags_(std::move(tags)),
      char_emb_("char_emb", vocab_.size(), cfg.d_h),
      encoder_("encoder", cfg.d_h, cfg.heads, cfg.layers, cfg.d_ff, cfg.dropout, cfg.max_seq_len),
      hidden_drop_(cfg.dropout),
      left_boundary_("left_boundary", 1, cfg.d_h, true),
      right_boundary_("right_boundary", 1, cfg.d_h, true),
      bigram_prev_("bigram_prev", 2 * cfg.d_h, cfg.d_b),
      bigram_next_("bigram_next", 2 * cfg.d_h, cfg.d_b),
      fusion_("fusion", cfg.d_h + 2 * cfg.d_b, cfg.d_l),
      head_("head", cfg.d_l, tags_.num_joint()) {
    const Scalar stddev = 0.02;
    char_emb_.init(init_rng, stddev);
    encoder_.init(init_rng, stddev);
    left_boundary_.init_normal(init_rng, stddev);
    right_boundary_.init_normal(init_rng, stddev);
    bigram_prev_.init(init_rng, stddev);
    bigram_next_.init(init_rng, stddev);
    fusion_.init(init_rng, stddev);
    head_.init(init_rng, stddev);
}

Matrix TaggerModel::encode(const std::vector<int>& char_ids, bool dropout_active, Rng& rng) {
    if (static_cast<int>(char_ids.size()) > cfg_.max_seq_len) {
        throw DataError("input length " + std::to_string(char_ids.size()) + " exceeds max_seq_len " +
                        std::to_string(cfg_.max_seq_len));
    }
    return encoder_.forward(char_emb_.forward(char_ids), dropout_active, rng);
}

std::pair<Matrix, Matrix> TaggerModel::bigram_features(const Matrix& h) {
    const Eigen::Index n = h.rows();
    const int d_h = cfg_.d_h;
    if (h.cols() != d_h) {
        throw CompatError("bigram features: hidden width " + std::to_string(h.cols()) + " != d_h " +
                          std::to_string(d_h));
    }
    // row i of the two inputs: [h_{i-1} | h_i] and [h_i | h_{i+1}], with the
    // learned boundary vectors standing in at the sentence edges.
    bigram_in_prev_.resize(n, 2 * d_h);
    bigram_in_next_.resize(n, 2 * d_h);
    bigram_in_prev_.block(0, 0, 1, d_h) = left_boundary_.value;
    if (n > 1) bigram_in_prev_.block(1, 0, n - 1, d_h) = h.topRows(n - 1);
    bigram_in_prev_.rightCols(d_h) = h;
    bigram_in_next_.leftCols(d_h) = h;
    if (n > 1) bigram_in_next_.block(0, d_h, n - 1, d_h) = h.bottomRows(n - 1);
    bigram_in_next_.block(n - 1, d_h, 1, d_h) = right_boundary_.value;
    return {bigram_prev_.forward(bigram_in_prev_), bigram_next_.forward(bigram_in_next_)};
}

Matrix TaggerModel::fuse(const Matrix& h, const Matrix& b1, const Matrix& b2) {
    if (h.cols() != cfg_.d_h || b1.cols() != cfg_.d_b || b2.cols() != cfg_.d_b ||
        h.rows() != b1.rows() || h.rows() != b2.rows()) {
        throw CompatError("fuse: inconsistent feature shapes");
    }
    composite_.resize(h.rows(), cfg_.d_h + 2 * cfg_.d_b);
    composite_ << h, b1, b2;
    return fusion_.forward(composite_);
}

Matrix TaggerModel::emit(const Matrix& l) { return softmax_rows(head_.forward(l)); }

Matrix TaggerModel::forward_logits(const std::vector<int>& char_ids, bool dropout_active, Rng& rng) {
    if (char_ids.empty()) return Matrix(0, tags_.num_joint());
    const Matrix h = encode(char_ids, dropout_active, rng);
    h_dropped_ = hidden_drop_.forward(h, dropout_active, rng);
    const auto [b1, b2] = bigram_features(h_dropped_);
    return head_.forward(fuse(h_dropped_, b1, b2));
}

Matrix TaggerModel::forward(const std::vector<int>& char_ids, bool dropout_active, Rng& rng) {
    if (char_ids.empty()) return Matrix(0, tags_.num_joint());
    return softmax_rows(forward_logits(char_ids, dropout_active, rng));
}

void TaggerModel::backward_from_logits(const Matrix& grad_logits) {
    const Eigen::Index n = grad_logits.rows();
    const int d_h = cfg_.d_h;
    const Matrix grad_fused = head_.backward(grad_logits);
    const Matrix grad_composite = fusion_.backward(grad_fused);
    Matrix grad_h = grad_composite.leftCols(d_h);
    const Matrix grad_prev_in = bigram_prev_.backward(grad_composite.middleCols(d_h, cfg_.d_b));
    const Matrix grad_next_in = bigram_next_.backward(grad_composite.rightCols(cfg_.d_b));
    grad_h += grad_prev_in.rightCols(d_h);
    grad_h += grad_next_in.leftCols(d_h);
    left_boundary_.grad += grad_prev_in.block(0, 0, 1, d_h);
    if (n > 1) grad_h.topRows(n - 1) += grad_prev_in.block(1, 0, n - 1, d_h);
    right_boundary_.grad += grad_next_in.block(n - 1, d_h, 1, d_h);
    if (n > 1) grad_h.bottomRows(n - 1) += grad_next_in.block(0, d_h, n - 1, d_h);
    char_emb_.backward(encoder_.backward(hidden_drop_.backward(grad_h)));
}

nn::ParamRefs TaggerModel::parameters() {
    nn::ParamRefs out;
    char_emb_.collect(out);
    encoder_.collect(out);
    out.push_back(&left_boundary_);
    out.push_back(&right_boundary_);
    bigram_prev_.collect(out);
    bigram_next_.collect(out);
    fusion_.collect(out);
    head_.collect(out);
    return out;
}

void TaggerModel::zero_grad() {
    for (auto* p : parameters()) p->zero_grad();
}

namespace {

// Position weights for the loss; throws when they sum to zero.
std::vector<Scalar> loss_weights(std::size_t n, const std::vector<UncertainComponent>& components,
                                 Scalar alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw UsageError("alpha must lie in [0, 1]");
    std::vector<Scalar> w(n, alpha);
    for (const auto& c : components) {
        for (int i = std::max(c.start, 0); i < c.end && i < static_cast<int>(n); ++i) {
            w[static_cast<std::size_t>(i)] = 1.0;
        }
    }
    Scalar total = 0.0;
    for (Scalar x : w) total += x;
    if (total <= 0.0) throw UsageError("weighted loss: all position weights are zero");
    return w;
}

void check_loss_shapes(const Matrix& p, const LabelSequence& gold, const TagSet& tags) {
    if (p.rows() < static_cast<Eigen::Index>(gold.size())) {
        throw CompatError("loss: " + std::to_string(p.rows()) + " emission rows for " +
                          std::to_string(gold.size()) + " gold labels");
    }
    if (p.cols() != tags.num_joint()) {
        throw CompatError("loss: emission width " + std::to_string(p.cols()) + " != tag count " +
                          std::to_string(tags.num_joint()));
    }
}

}  // namespace

Scalar weighted_loss(const Matrix& p, const LabelSequence& gold, const TagSet& tags,
                     const std::vector<UncertainComponent>& components, Scalar alpha) {
    check_loss_shapes(p, gold, tags);
    const auto w = loss_weights(gold.size(), components, alpha);
    Scalar total = 0.0, total_w = 0.0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (w[i] == 0.0) continue;
        const Scalar prob = std::max(p(static_cast<Eigen::Index>(i), tags.joint_index(gold[i])), 1e-300);
        total += w[i] * -std::log(prob);
        total_w += w[i];
    }
    return total / total_w;
}

Matrix weighted_loss_grad_p(const Matrix& p, const LabelSequence& gold, const TagSet& tags,
                            const std::vector<UncertainComponent>& components, Scalar alpha) {
    check_loss_shapes(p, gold, tags);
    const auto w = loss_weights(gold.size(), components, alpha);
    Scalar total_w = 0.0;
    for (Scalar x : w) total_w += x;
    Matrix grad = Matrix::Zero(p.rows(), p.cols());
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (w[i] == 0.0) continue;
        const Eigen::Index j = tags.joint_index(gold[i]);
        grad(static_cast<Eigen::Index>(i), j) =
            -w[i] / (total_w * std::max(p(static_cast<Eigen::Index>(i), j), 1e-300));
    }
    return grad;
}

Matrix weighted_loss_grad_logits(const Matrix& p, const LabelSequence& gold, const TagSet& tags,
                                 const std::vector<UncertainComponent>& components, Scalar alpha) {
    check_loss_shapes(p, gold, tags);
    const auto w = loss_weights(gold.size(), components, alpha);
    Scalar total_w = 0.0;
    for (Scalar x : w) total_w += x;
    Matrix grad = Matrix::Zero(p.rows(), p.cols());
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (w[i] == 0.0) continue;
        const auto row = static_cast<Eigen::Index>(i);
        grad.row(row) = p.row(row) * (w[i] / total_w);
        grad(row, tags.joint_index(gold[i])) -= w[i] / total_w;
    }
    return grad;
}

}  // namespace segtag
