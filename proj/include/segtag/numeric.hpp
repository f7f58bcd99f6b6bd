#pragma once

#include "segtag/types.hpp"

#include <cmath>

namespace segtag {

// Row-wise softmax with max-subtraction stabilization.
template <typename Derived>
Matrix softmax_rows(const Eigen::MatrixBase<Derived>& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const Scalar m = logits.row(i).maxCoeff();
        out.row(i) = (logits.row(i).array() - m).exp();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

// Row-wise log-softmax; log-sum-exp computed against the row max.
template <typename Derived>
Matrix log_softmax_rows(const Eigen::MatrixBase<Derived>& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const Scalar m = logits.row(i).maxCoeff();
        const Scalar lse = m + std::log((logits.row(i).array() - m).exp().sum());
        out.row(i) = logits.row(i).array() - lse;
    }
    return out;
}

inline Scalar gelu(Scalar x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

inline Scalar gelu_grad(Scalar x) {
    const Scalar cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
    const Scalar pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    return cdf + x * pdf;
}

template <typename Derived>
Matrix gelu(const Eigen::MatrixBase<Derived>& x) {
    return x.unaryExpr([](Scalar v) { return gelu(v); });
}

template <typename Derived>
Matrix gelu_grad(const Eigen::MatrixBase<Derived>& x) {
    return x.unaryExpr([](Scalar v) { return gelu_grad(v); });
}

// True when every row of p sums to 1 within tol and entries lie in [0, 1].
template <typename Derived>
bool rows_normalized(const Eigen::MatrixBase<Derived>& p, Scalar tol = 1e-6) {
    if ((p.array() < -tol).any() || (p.array() > 1.0 + tol).any()) return false;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        if (std::abs(p.row(i).sum() - 1.0) > tol) return false;
    }
    return true;
}

}  // namespace segtag
