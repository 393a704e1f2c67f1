#pragma once

// Test-only helpers shared between the unit suites and the acceptance
// binary. The finite-difference machinery here is the independent oracle for
// every analytic gradient in the library; it must never call the analytic
// path it checks.

#include <cmath>
#include <vector>

#include "ocff/losses.hpp"
#include "ocff/network.hpp"
#include "ocff/rng.hpp"
#include "ocff/training.hpp"

namespace ocff::testsupport {

inline Matrix random_matrix(SplitMix64& rng, Index rows, Index cols,
                            double lo, double hi) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = rng.uniform(lo, hi);
    return m;
}

/// Loss of the network output under a frozen loss state. This is the scalar
/// function the parameter gradients are taken of.
inline double frozen_loss(const Network& net, const Matrix& x,
                          const LossSpec& spec, const LossState& state,
                          bool sum_layer_losses = false) {
    const std::vector<Matrix> hs = forward_all(net, x);
    if (!sum_layer_losses)
        return evaluate(hs.back(), spec, state).total;
    double total = 0.0;
    for (const Matrix& h : hs)
        total += evaluate(h, spec, calibrate_state(h, spec)).total;
    return total;
}

struct ParamGrads {
    std::vector<Matrix> w;
    std::vector<Vector> b;
};

/// Analytic parameter gradients of frozen_loss via the library's chain rule.
inline ParamGrads analytic_param_grads(const Network& net, const Matrix& x,
                                       const LossSpec& spec,
                                       const LossState& state) {
    const std::vector<Matrix> hs = forward_all(net, x);
    const Index depth = net.depth();
    ParamGrads grads;
    grads.w.resize(static_cast<std::size_t>(depth));
    grads.b.resize(static_cast<std::size_t>(depth));
    Matrix upstream = evaluate(hs.back(), spec, state).grad_h;
    for (Index l = depth - 1; l >= 0; --l) {
        const Matrix& input =
            l == 0 ? x : hs[static_cast<std::size_t>(l - 1)];
        LayerGrads g = layer_grads(net.layers[static_cast<std::size_t>(l)],
                                   input, upstream);
        grads.w[static_cast<std::size_t>(l)] = std::move(g.w);
        grads.b[static_cast<std::size_t>(l)] = std::move(g.b);
        upstream = std::move(g.x);
    }
    return grads;
}

inline double rel_err(double analytic, double numeric) {
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    return scale < 1e-8 ? std::abs(analytic - numeric)
                        : std::abs(analytic - numeric) / scale;
}

/// Central finite differences over every weight and bias entry against the
/// analytic gradients; returns the worst relative error.
inline double max_param_grad_rel_err(Network net, const Matrix& x,
                                     const LossSpec& spec,
                                     const LossState& state, double eps) {
    const ParamGrads analytic = analytic_param_grads(net, x, spec, state);
    double worst = 0.0;
    for (Index l = 0; l < net.depth(); ++l) {
        DenseLayer& layer = net.layers[static_cast<std::size_t>(l)];
        for (Index i = 0; i < layer.w.rows(); ++i)
            for (Index j = 0; j < layer.w.cols(); ++j) {
                const double kept = layer.w(i, j);
                layer.w(i, j) = kept + eps;
                const double up = frozen_loss(net, x, spec, state);
                layer.w(i, j) = kept - eps;
                const double down = frozen_loss(net, x, spec, state);
                layer.w(i, j) = kept;
                const double fd = (up - down) / (2.0 * eps);
                worst = std::max(
                    worst,
                    rel_err(analytic.w[static_cast<std::size_t>(l)](i, j),
                            fd));
            }
        for (Index j = 0; j < layer.b.size(); ++j) {
            const double kept = layer.b[j];
            layer.b[j] = kept + eps;
            const double up = frozen_loss(net, x, spec, state);
            layer.b[j] = kept - eps;
            const double down = frozen_loss(net, x, spec, state);
            layer.b[j] = kept;
            const double fd = (up - down) / (2.0 * eps);
            worst = std::max(
                worst,
                rel_err(analytic.b[static_cast<std::size_t>(l)][j], fd));
        }
    }
    return worst;
}

/// True when every pre-activation in the stack sits clear of the ReLU kink.
inline bool clear_of_relu_kinks(const Network& net, const Matrix& x,
                                double margin) {
    Matrix input = x;
    for (const DenseLayer& layer : net.layers) {
        const Matrix pre = add_row_broadcast(matmul(input, layer.w),
                                             layer.b);
        if (pre.array().abs().minCoeff() < margin)
            return false;
        input = relu(pre);
    }
    return true;
}

/// True when every squared center distance sits clear of the SVDD hinge.
inline bool clear_of_hinge(const Matrix& h, const LossState& state,
                           double margin) {
    const Matrix diff = h.rowwise() - state.center.transpose();
    const Vector sq = row_sq_norms(diff);
    for (Index i = 0; i < sq.size(); ++i)
        if (std::abs(sq[i] - state.radius_sq) < margin)
            return false;
    return true;
}

struct GradCase {
    Network net;
    Matrix x;
    LossSpec spec;
    LossState state;
};

/// Draw a random (network, batch, spec, frozen state) clear of every ReLU
/// and hinge kink, so finite differences are trustworthy. Redraws until the
/// margins hold.
inline GradCase draw_grad_case(SplitMix64& rng, LossKind kind,
                               double margin = 1e-3) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        const Index depth = 1 + Index(rng.bounded(3));
        std::vector<Index> arch{2 + Index(rng.bounded(3))};
        for (Index l = 0; l < depth; ++l)
            arch.push_back(2 + Index(rng.bounded(4)));
        GradCase c;
        c.net = init_network(arch, rng.next_u64());
        // nonzero biases push pre-activations off the kink
        for (DenseLayer& layer : c.net.layers)
            for (Index j = 0; j < layer.b.size(); ++j)
                layer.b[j] = rng.uniform(-0.4, 0.4);
        c.x = random_matrix(rng, 3 + Index(rng.bounded(4)), arch.front(),
                            -2.0, 2.0);
        c.spec = default_loss_spec(kind);
        c.spec.c = rng.uniform(0.5, 3.0);
        if (!clear_of_relu_kinks(c.net, c.x, margin))
            continue;
        const Matrix h_top = forward_all(c.net, c.x).back();
        c.state = calibrate_state(h_top, c.spec);
        if (kind == LossKind::Svdd && !clear_of_hinge(h_top, c.state, margin))
            continue;
        return c;
    }
    throw std::runtime_error("draw_grad_case: no kink-free draw in 200 "
                             "attempts");
}

} // namespace ocff::testsupport
