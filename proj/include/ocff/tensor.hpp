#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ocff/errors.hpp"
#include "ocff/types.hpp"

namespace ocff {

namespace detail {

inline std::string shape_of(Index rows, Index cols) {
    return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

} // namespace detail

/// C = A * B. Shapes must chain; the error names both operands.
template <class DA, class DB>
Matrix matmul(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: cannot multiply " +
                         detail::shape_of(a.rows(), a.cols()) + " by " +
                         detail::shape_of(b.rows(), b.cols()));
    return a * b;
}

/// out[i,j] = m[i,j] + v[j]; the row-vector broadcast used for bias addition.
template <class DM, class DV>
Matrix add_row_broadcast(const Eigen::MatrixBase<DM>& m,
                         const Eigen::MatrixBase<DV>& v) {
    if (m.cols() != v.size())
        throw ShapeError("add_row_broadcast: matrix " +
                         detail::shape_of(m.rows(), m.cols()) +
                         " vs vector of length " + std::to_string(v.size()));
    return m.rowwise() + v.transpose();
}

/// Elementwise max(0, x).
template <class DM>
Matrix relu(const Eigen::MatrixBase<DM>& m) {
    return m.cwiseMax(0.0);
}

/// out[i] = sum_j m[i,j]^2.
template <class DM>
Vector row_sq_norms(const Eigen::MatrixBase<DM>& m) {
    return m.rowwise().squaredNorm();
}

/// Per-column mean over rows. Rejects an empty batch.
template <class DM>
Vector col_means(const Eigen::MatrixBase<DM>& m) {
    if (m.rows() == 0)
        throw DataError("col_means: empty batch, no rows to average");
    return m.colwise().mean().transpose();
}

/// Copy the selected rows, in the order given.
template <class DM>
Matrix gather_rows(const Eigen::MatrixBase<DM>& m,
                   const std::vector<Index>& idx) {
    Matrix out(static_cast<Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= m.rows())
            throw ShapeError("gather_rows: index " + std::to_string(idx[i]) +
                             " out of range for " +
                             detail::shape_of(m.rows(), m.cols()));
        out.row(static_cast<Index>(i)) = m.row(idx[i]);
    }
    return out;
}

/// Empirical p-quantile with linear interpolation between the two closest
/// order statistics (position p*(n-1)). The interpolation rule is pinned so
/// thresholds reproduce across languages.
inline double quantile(Vector values, double p) {
    if (values.size() == 0)
        throw DataError("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError("quantile: p must lie in [0,1], got " +
                          std::to_string(p));
    std::sort(values.begin(), values.end());
    const double pos = p * double(values.size() - 1);
    const Index lo = static_cast<Index>(std::floor(pos));
    const Index hi = static_cast<Index>(std::ceil(pos));
    const double frac = pos - double(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

} // namespace ocff
