#include "segtag/nn.hpp"

#include "segtag/numeric.hpp"

#include <cmath>

namespace segtag::nn {

// ---- Linear ---------------------------------------------------------------

Linear::Linear(std::string name, int in_dim, int out_dim)
    : weight_(name + ".weight", out_dim, in_dim, true), bias_(name + ".bias", 1, out_dim, false) {}

void Linear::init(Rng& rng, Scalar stddev) {
    weight_.init_normal(rng, stddev);
    bias_.value.setZero();
}

Matrix Linear::forward(const Matrix& x) {
    if (x.cols() != weight_.value.cols()) {
        throw CompatError("linear layer " + weight_.name + ": input width " + std::to_string(x.cols()) +
                          " != " + std::to_string(weight_.value.cols()));
    }
    x_ = x;
    return (x * weight_.value.transpose()).rowwise() + bias_.value.row(0);
}

Matrix Linear::backward(const Matrix& grad_y) {
    weight_.grad.noalias() += grad_y.transpose() * x_;
    bias_.grad.row(0) += grad_y.colwise().sum();
    return grad_y * weight_.value;
}

void Linear::collect(ParamRefs& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
}

// ---- Embedding ------------------------------------------------------------

Embedding::Embedding(std::string name, int rows, int width)
    : table_(name + ".table", rows, width, true) {}

void Embedding::init(Rng& rng, Scalar stddev) { table_.init_normal(rng, stddev); }

Matrix Embedding::forward(const std::vector<int>& ids) {
    Matrix out(static_cast<Eigen::Index>(ids.size()), table_.value.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= table_.value.rows()) {
            throw CompatError("embedding " + table_.name + ": id " + std::to_string(ids[i]) + " out of range");
        }
        out.row(static_cast<Eigen::Index>(i)) = table_.value.row(ids[i]);
    }
    ids_ = ids;  // only after validation: a failed forward must not clobber the cache
    return out;
}

void Embedding::backward(const Matrix& grad_y) {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        table_.grad.row(ids_[i]) += grad_y.row(static_cast<Eigen::Index>(i));
    }
}

void Embedding::collect(ParamRefs& out) { out.push_back(&table_); }

// ---- Dropout ----------------------------------------------------------------

Matrix Dropout::forward(const Matrix& x, bool train, Rng& rng) {
    active_ = train && rate_ > 0.0;
    if (!active_) return x;
    const Scalar keep = 1.0 - rate_;
    mask_.resize(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            mask_(i, j) = rng.bernoulli(rate_) ? 0.0 : 1.0 / keep;
    return x.cwiseProduct(mask_);
}

Matrix Dropout::backward(const Matrix& grad_y) const {
    if (!active_) return grad_y;
    return grad_y.cwiseProduct(mask_);
}

// ---- LayerNorm --------------------------------------------------------------

namespace {
constexpr Scalar kNormEps = 1e-5;
}

LayerNorm::LayerNorm(std::string name, int dim)
    : gamma_(name + ".gamma", 1, dim, false), beta_(name + ".beta", 1, dim, false) {
    gamma_.value.setOnes();
}

Matrix LayerNorm::forward(const Matrix& x) {
    const Eigen::Index n = x.rows(), d = x.cols();
    xhat_.resize(n, d);
    inv_std_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar mean = x.row(i).mean();
        const Scalar var = (x.row(i).array() - mean).square().mean();
        inv_std_(i) = 1.0 / std::sqrt(var + kNormEps);
        xhat_.row(i) = (x.row(i).array() - mean) * inv_std_(i);
    }
    return (xhat_.array().rowwise() * gamma_.value.row(0).array()).rowwise() +
           beta_.value.row(0).array();
}

Matrix LayerNorm::backward(const Matrix& grad_y) {
    const Eigen::Index n = grad_y.rows(), d = grad_y.cols();
    gamma_.grad.row(0) += (grad_y.array() * xhat_.array()).colwise().sum().matrix();
    beta_.grad.row(0) += grad_y.colwise().sum();
    Matrix grad_x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto g = (grad_y.row(i).array() * gamma_.value.row(0).array()).matrix();
        const Scalar g_mean = g.mean();
        const Scalar gx_mean = (g.array() * xhat_.row(i).array()).mean();
        grad_x.row(i) =
            ((g.array() - g_mean - xhat_.row(i).array() * gx_mean) * inv_std_(i)).matrix();
    }
    return grad_x;
}

void LayerNorm::collect(ParamRefs& out) {
    out.push_back(&gamma_);
    out.push_back(&beta_);
}

// ---- MultiHeadAttention ------------------------------------------------------

MultiHeadAttention::MultiHeadAttention(std::string name, int d_model, int heads)
    : heads_(heads),
      d_head_(d_model / heads),
      query_(name + ".query", d_model, d_model),
      key_(name + ".key", d_model, d_model),
      value_(name + ".value", d_model, d_model),
      output_(name + ".output", d_model, d_model) {
    if (d_model % heads != 0) {
        throw CompatError("attention width " + std::to_string(d_model) + " not divisible by " +
                          std::to_string(heads) + " heads");
    }
}

void MultiHeadAttention::init(Rng& rng, Scalar stddev) {
    query_.init(rng, stddev);
    key_.init(rng, stddev);
    value_.init(rng, stddev);
    output_.init(rng, stddev);
}

Matrix MultiHeadAttention::forward(const Matrix& x) {
    const Eigen::Index n = x.rows();
    q_ = query_.forward(x);
    k_ = key_.forward(x);
    v_ = value_.forward(x);
    probs_.assign(static_cast<std::size_t>(heads_), Matrix());
    const Scalar scale = 1.0 / std::sqrt(static_cast<Scalar>(d_head_));
    Matrix concat(n, heads_ * d_head_);
    for (int h = 0; h < heads_; ++h) {
        const auto qh = q_.middleCols(h * d_head_, d_head_);
        const auto kh = k_.middleCols(h * d_head_, d_head_);
        const auto vh = v_.middleCols(h * d_head_, d_head_);
        Matrix scores = qh * kh.transpose() * scale;
        probs_[static_cast<std::size_t>(h)] = softmax_rows(scores);
        concat.middleCols(h * d_head_, d_head_) = probs_[static_cast<std::size_t>(h)] * vh;
    }
    return output_.forward(concat);
}

Matrix MultiHeadAttention::backward(const Matrix& grad_y) {
    const Matrix grad_concat = output_.backward(grad_y);
    const Eigen::Index n = grad_concat.rows();
    const Scalar scale = 1.0 / std::sqrt(static_cast<Scalar>(d_head_));
    Matrix grad_q(n, heads_ * d_head_), grad_k(n, heads_ * d_head_), grad_v(n, heads_ * d_head_);
    for (int h = 0; h < heads_; ++h) {
        const auto& p = probs_[static_cast<std::size_t>(h)];
        const auto qh = q_.middleCols(h * d_head_, d_head_);
        const auto kh = k_.middleCols(h * d_head_, d_head_);
        const auto vh = v_.middleCols(h * d_head_, d_head_);
        const auto grad_oh = grad_concat.middleCols(h * d_head_, d_head_);
        Matrix grad_p = grad_oh * vh.transpose();
        grad_v.middleCols(h * d_head_, d_head_) = p.transpose() * grad_oh;
        // softmax backward per row
        Matrix grad_s(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar dot = grad_p.row(i).dot(p.row(i));
            grad_s.row(i) = (p.row(i).array() * (grad_p.row(i).array() - dot)).matrix();
        }
        grad_q.middleCols(h * d_head_, d_head_) = grad_s * kh * scale;
        grad_k.middleCols(h * d_head_, d_head_) = grad_s.transpose() * qh * scale;
    }
    Matrix grad_x = query_.backward(grad_q);
    grad_x += key_.backward(grad_k);
    grad_x += value_.backward(grad_v);
    return grad_x;
}

void MultiHeadAttention::collect(ParamRefs& out) {
    query_.collect(out);
    key_.collect(out);
    value_.collect(out);
    output_.collect(out);
}

// ---- EncoderLayer -------------------------------------------------------------

EncoderLayer::EncoderLayer(std::string name, int d_model, int heads, int d_ff, Scalar dropout)
    : attn_(name + ".attn", d_model, heads),
      norm1_(name + ".norm1", d_model),
      norm2_(name + ".norm2", d_model),
      ff1_(name + ".ff1", d_model, d_ff),
      ff2_(name + ".ff2", d_ff, d_model),
      drop_attn_(dropout),
      drop_ff_(dropout) {}

void EncoderLayer::init(Rng& rng, Scalar stddev) {
    attn_.init(rng, stddev);
    ff1_.init(rng, stddev);
    ff2_.init(rng, stddev);
}

Matrix EncoderLayer::forward(const Matrix& x, bool train, Rng& rng) {
    const Matrix attended = attn_.forward(x);
    const Matrix y1 = norm1_.forward(x + drop_attn_.forward(attended, train, rng));
    ff_pre_ = ff1_.forward(y1);
    const Matrix ff_out = ff2_.forward(gelu(ff_pre_));
    return norm2_.forward(y1 + drop_ff_.forward(ff_out, train, rng));
}

Matrix EncoderLayer::backward(const Matrix& grad_y) {
    const Matrix grad_r2 = norm2_.backward(grad_y);
    Matrix grad_y1 = grad_r2;
    const Matrix grad_ff_out = drop_ff_.backward(grad_r2);
    const Matrix grad_gelu = ff2_.backward(grad_ff_out);
    grad_y1 += ff1_.backward(grad_gelu.cwiseProduct(gelu_grad(ff_pre_)));
    const Matrix grad_r1 = norm1_.backward(grad_y1);
    Matrix grad_x = grad_r1;
    grad_x += attn_.backward(drop_attn_.backward(grad_r1));
    return grad_x;
}

void EncoderLayer::collect(ParamRefs& out) {
    attn_.collect(out);
    norm1_.collect(out);
    norm2_.collect(out);
    ff1_.collect(out);
    ff2_.collect(out);
}

// ---- TransformerEncoder ----------------------------------------------------------

TransformerEncoder::TransformerEncoder(std::string name, int d_model, int heads, int layers,
                                       int d_ff, Scalar dropout, int max_len)
    : pos_emb_(name + ".pos_emb", max_len, d_model, true),
      input_norm_(name + ".input_norm", d_model),
      input_drop_(dropout) {
    layers_.reserve(static_cast<std::size_t>(layers));
    for (int i = 0; i < layers; ++i) {
        layers_.emplace_back(name + ".layer" + std::to_string(i), d_model, heads, d_ff, dropout);
    }
}

void TransformerEncoder::init(Rng& rng, Scalar stddev) {
    pos_emb_.init_normal(rng, stddev);
    for (auto& layer : layers_) layer.init(rng, stddev);
}

Matrix TransformerEncoder::forward(const Matrix& embedded, bool train, Rng& rng) {
    const Eigen::Index n = embedded.rows();
    if (n > pos_emb_.value.rows()) {
        throw DataError("sequence length " + std::to_string(n) + " exceeds position table " +
                        std::to_string(pos_emb_.value.rows()));
    }
    last_n_ = static_cast<int>(n);
    Matrix x = embedded + pos_emb_.value.topRows(n);
    x = input_drop_.forward(input_norm_.forward(x), train, rng);
    for (auto& layer : layers_) x = layer.forward(x, train, rng);
    return x;
}

Matrix TransformerEncoder::backward(const Matrix& grad_y) {
    Matrix grad = grad_y;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) grad = it->backward(grad);
    grad = input_norm_.backward(input_drop_.backward(grad));
    pos_emb_.grad.topRows(last_n_) += grad;
    return grad;
}

void TransformerEncoder::collect(ParamRefs& out) {
    out.push_back(&pos_emb_);
    input_norm_.collect(out);
    for (auto& layer : layers_) layer.collect(out);
}

// ---- AdamW ------------------------------------------------------------------------

AdamW::AdamW(ParamRefs params, Scalar weight_decay, Scalar beta1, Scalar beta2, Scalar eps)
    : params_(std::move(params)), weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {
    slots_.reserve(params_.size());
    for (const auto* p : params_) {
        slots_.push_back({Matrix::Zero(p->value.rows(), p->value.cols()),
                          Matrix::Zero(p->value.rows(), p->value.cols())});
    }
}

void AdamW::zero_grad() {
    for (auto* p : params_) p->zero_grad();
}

void AdamW::step(Scalar lr) {
    ++t_;
    const Scalar bc1 = 1.0 - std::pow(beta1_, static_cast<Scalar>(t_));
    const Scalar bc2 = 1.0 - std::pow(beta2_, static_cast<Scalar>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Parameter& p = *params_[i];
        Slot& s = slots_[i];
        s.m = beta1_ * s.m + (1.0 - beta1_) * p.grad;
        s.v = beta2_ * s.v + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
        const Matrix update =
            (s.m / bc1).array() / ((s.v / bc2).array().sqrt() + eps_) * lr;
        p.value -= update;
        if (p.decay) p.value -= lr * weight_decay_ * p.value;
    }
}

Scalar scheduled_lr(long step, long total_steps, Scalar base_lr, Scalar warmup_ratio) {
    if (total_steps <= 0) return base_lr;
    const long warmup = std::max<long>(1, static_cast<long>(warmup_ratio * static_cast<Scalar>(total_steps)));
    if (step < warmup) return base_lr * static_cast<Scalar>(step + 1) / static_cast<Scalar>(warmup);
    if (total_steps <= warmup) return base_lr;
    const Scalar remaining = static_cast<Scalar>(total_steps - step) / static_cast<Scalar>(total_steps - warmup);
    return base_lr * std::max<Scalar>(0.0, remaining);
}

}  // namespace segtag::nn
