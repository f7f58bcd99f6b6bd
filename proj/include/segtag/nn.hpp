#pragma once

#include "segtag/rng.hpp"
#include "segtag/types.hpp"

#include <string>
#include <vector>

namespace segtag::nn {

// A trainable tensor with its accumulated gradient. `decay` marks weight
// matrices and embedding tables; biases and LayerNorm parameters are not
// weight-decayed.
struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;
    bool decay = true;

    Parameter() = default;
    Parameter(std::string name, Eigen::Index rows, Eigen::Index cols, bool decay = true)
        : name(std::move(name)), value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)), decay(decay) {}

    void zero_grad() { grad.setZero(); }
    void init_normal(Rng& rng, Scalar stddev) {
        for (Eigen::Index i = 0; i < value.rows(); ++i)
            for (Eigen::Index j = 0; j < value.cols(); ++j) value(i, j) = rng.normal(0.0, stddev);
    }
};

using ParamRefs = std::vector<Parameter*>;

// y = x W^T + b with x (n x in), W (out x in), b (1 x out).
class Linear {
public:
    Linear(std::string name, int in_dim, int out_dim);

    void init(Rng& rng, Scalar stddev = 0.02);
    Matrix forward(const Matrix& x);
    // Accumulates parameter gradients, returns the input gradient.
    Matrix backward(const Matrix& grad_y);
    void collect(ParamRefs& out);

    int in_dim() const { return static_cast<int>(weight_.value.cols()); }
    int out_dim() const { return static_cast<int>(weight_.value.rows()); }
    Parameter& weight() { return weight_; }
    Parameter& bias() { return bias_; }

private:
    Parameter weight_;
    Parameter bias_;
    Matrix x_;
};

// Lookup table; backward scatters row gradients.
class Embedding {
public:
    Embedding(std::string name, int rows, int width);

    void init(Rng& rng, Scalar stddev = 0.02);
    Matrix forward(const std::vector<int>& ids);
    void backward(const Matrix& grad_y);
    void collect(ParamRefs& out);

    int rows() const { return static_cast<int>(table_.value.rows()); }
    int width() const { return static_cast<int>(table_.value.cols()); }
    Parameter& table() { return table_; }

private:
    Parameter table_;
    std::vector<int> ids_;
};

// Inverted dropout. In eval mode (train=false) it is the identity; keeping
// train=true at inference is what realizes MC sampling.
class Dropout {
public:
    explicit Dropout(Scalar rate) : rate_(rate) {}

    Matrix forward(const Matrix& x, bool train, Rng& rng);
    Matrix backward(const Matrix& grad_y) const;
    Scalar rate() const { return rate_; }

private:
    Scalar rate_;
    Matrix mask_;
    bool active_ = false;
};

// Per-row layer normalization with learned gain/shift.
class LayerNorm {
public:
    LayerNorm(std::string name, int dim);

    Matrix forward(const Matrix& x);
    Matrix backward(const Matrix& grad_y);
    void collect(ParamRefs& out);

private:
    Parameter gamma_;
    Parameter beta_;
    Matrix xhat_;
    Vector inv_std_;
};

class MultiHeadAttention {
public:
    MultiHeadAttention(std::string name, int d_model, int heads);

    void init(Rng& rng, Scalar stddev = 0.02);
    Matrix forward(const Matrix& x);
    Matrix backward(const Matrix& grad_y);
    void collect(ParamRefs& out);

private:
    int heads_;
    int d_head_;
    Linear query_, key_, value_, output_;
    Matrix q_, k_, v_;
    std::vector<Matrix> probs_;
};

// Post-norm transformer block: x -> LN(x + Drop(Attn(x))) -> LN(. + Drop(FFN(.))).
class EncoderLayer {
public:
    EncoderLayer(std::string name, int d_model, int heads, int d_ff, Scalar dropout);

    void init(Rng& rng, Scalar stddev = 0.02);
    Matrix forward(const Matrix& x, bool train, Rng& rng);
    Matrix backward(const Matrix& grad_y);
    void collect(ParamRefs& out);

private:
    MultiHeadAttention attn_;
    LayerNorm norm1_, norm2_;
    Linear ff1_, ff2_;
    Dropout drop_attn_, drop_ff_;
    Matrix ff_pre_;
};

// Stack of encoder layers over summed input embeddings. Owns the learned
// position embeddings and the post-embedding norm/dropout.
class TransformerEncoder {
public:
    TransformerEncoder(std::string name, int d_model, int heads, int layers, int d_ff,
                       Scalar dropout, int max_len);

    void init(Rng& rng, Scalar stddev = 0.02);
    // embedded: n x d_model, n <= max_len (checked by callers against their
    // sequence budget).
    Matrix forward(const Matrix& embedded, bool train, Rng& rng);
    // Returns the gradient w.r.t. the embedded input.
    Matrix backward(const Matrix& grad_y);
    void collect(ParamRefs& out);

    int max_len() const { return static_cast<int>(pos_emb_.value.rows()); }
    int d_model() const { return static_cast<int>(pos_emb_.value.cols()); }

private:
    Parameter pos_emb_;
    LayerNorm input_norm_;
    Dropout input_drop_;
    std::vector<EncoderLayer> layers_;
    int last_n_ = 0;
};

// Decoupled weight decay Adam. Decay applies only to parameters flagged
// `decay`.
class AdamW {
public:
    explicit AdamW(ParamRefs params, Scalar weight_decay, Scalar beta1 = 0.9, Scalar beta2 = 0.999,
                   Scalar eps = 1e-8);

    void zero_grad();
    void step(Scalar lr);

private:
    struct Slot {
        Matrix m, v;
    };
    ParamRefs params_;
    std::vector<Slot> slots_;
    Scalar weight_decay_, beta1_, beta2_, eps_;
    long t_ = 0;
};

// Linear warm-up over warmup_ratio of the run, then linear decay to zero.
// `step` counts optimizer steps starting at 0.
Scalar scheduled_lr(long step, long total_steps, Scalar base_lr, Scalar warmup_ratio);

}  // namespace segtag::nn
