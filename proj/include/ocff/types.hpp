#pragma once

#include <Eigen/Dense>

namespace ocff {

// Dense storage is row-major throughout: samples are rows, and serialization
// walks memory in row order.
template <class Scalar>
using MatrixT =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixT<double>;
using Vector = VectorT<double>;
using IntVector = VectorT<int>;
using Index = Eigen::Index;

} // namespace ocff
