#pragma once

#include <cstdint>
#include <vector>

#include "ocff/tensor.hpp"

namespace ocff {

/// One dense layer: weights [p x q], bias [q], ReLU applied on the forward
/// pass.
struct DenseLayer {
    Matrix w;
    Vector b;
};

/// An ordered stack of dense ReLU layers. architecture lists the widths,
/// input first: (4,10,10) means two trained layers shaped 4x10 and 10x10
/// and no extra output head.
struct Network {
    std::vector<Index> architecture;
    std::vector<DenseLayer> layers;

    Index input_width() const { return architecture.front(); }
    Index output_width() const { return architecture.back(); }
    Index depth() const { return static_cast<Index>(layers.size()); }
};

/// Deterministic initialization from (architecture, seed): weights uniform
/// in (-1/sqrt(p), 1/sqrt(p)) drawn row-major from one SplitMix64 stream,
/// biases zero.
Network init_network(const std::vector<Index>& architecture,
                     std::uint64_t seed);

/// ReLU(x W + b).
Matrix layer_forward(const DenseLayer& layer, const Matrix& x);

/// All intermediate activations h[1]..h[L], in order.
std::vector<Matrix> forward_all(const Network& net, const Matrix& x);

} // namespace ocff
