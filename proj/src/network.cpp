#include "ocff/network.hpp"

#include <cmath>
#include <string>

#include "ocff/rng.hpp"

namespace ocff {

Network init_network(const std::vector<Index>& architecture,
                     std::uint64_t seed) {
    if (architecture.size() < 2)
        throw ConfigError("init_network: architecture needs at least an "
                          "input and one layer width, got " +
                          std::to_string(architecture.size()) + " entries");
    for (Index w : architecture)
        if (w < 1)
            throw ConfigError("init_network: layer widths must be >= 1");

    Network net;
    net.architecture = architecture;
    SplitMix64 rng(seed);
    for (std::size_t l = 0; l + 1 < architecture.size(); ++l) {
        const Index p = architecture[l];
        const Index q = architecture[l + 1];
        DenseLayer layer;
        layer.w.resize(p, q);
        const double bound = 1.0 / std::sqrt(double(p));
        for (Index i = 0; i < p; ++i)
            for (Index j = 0; j < q; ++j)
                layer.w(i, j) = rng.uniform(-bound, bound);
        layer.b = Vector::Zero(q);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

Matrix layer_forward(const DenseLayer& layer, const Matrix& x) {
    return relu(add_row_broadcast(matmul(x, layer.w), layer.b));
}

std::vector<Matrix> forward_all(const Network& net, const Matrix& x) {
    std::vector<Matrix> activations;
    activations.reserve(net.layers.size());
    const Matrix* input = &x;
    for (const DenseLayer& layer : net.layers) {
        activations.push_back(layer_forward(layer, *input));
        input = &activations.back();
    }
    return activations;
}

} // namespace ocff
