#include "ocff/training.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "ocff/rng.hpp"
#include "ocff/text.hpp"

namespace ocff {

namespace {

// Decouples the mini-batch shuffle stream from the init stream that used
// the same seed.
constexpr std::uint64_t kBatchStreamSalt = 0x5851f42d4c957f2dULL;

std::string at_epoch_layer(Index epoch, Index layer) {
    return "epoch " + std::to_string(epoch) + ", layer " +
           std::to_string(layer);
}

void check_finite_params(const Network& net, Index epoch, Index layer) {
    const DenseLayer& l = net.layers[static_cast<std::size_t>(layer)];
    if (!l.w.allFinite() || !l.b.allFinite())
        throw NumericError("training diverged: non-finite parameters at " +
                           at_epoch_layer(epoch, layer));
}

} // namespace

const char* regime_id(Regime regime) {
    return regime == Regime::ForwardForward ? "ff" : "bp";
}

Regime regime_from_id(const std::string& id) {
    if (id == "ff")
        return Regime::ForwardForward;
    if (id == "bp")
        return Regime::Backprop;
    throw ConfigError("unknown regime '" + id + "' (expected ff or bp)");
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0))
        throw ConfigError("train config: learning_rate must be >= 0");
    if (epochs_max < 1)
        throw ConfigError("train config: epochs_max must be >= 1");
    if (batch_size < 0)
        throw ConfigError("train config: batch_size must be >= 0 "
                          "(0 = full batch)");
    if (patience < 1)
        throw ConfigError("train config: patience must be >= 1");
    if (!(nu > 0.0 && nu < 1.0))
        throw ConfigError("train config: nu must lie in (0,1)");
}

void write_report_csv(const TrainReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("write_report_csv: cannot open '" + path + "'");
    out << "epoch,train_loss,valid_loss\n";
    for (Index e = 0; e < report.epochs_run; ++e)
        out << e << ',' << full_precision(report.train_loss_curve[e]) << ','
            << full_precision(report.valid_loss_curve[e]) << '\n';
}

DenseLayer sgd_step(const DenseLayer& layer, const Matrix& grad_w,
                    const Vector& grad_b, double learning_rate, Index n) {
    if (grad_w.rows() != layer.w.rows() || grad_w.cols() != layer.w.cols())
        throw ShapeError("sgd_step: grad_w is " +
                         detail::shape_of(grad_w.rows(), grad_w.cols()) +
                         ", layer is " +
                         detail::shape_of(layer.w.rows(), layer.w.cols()));
    if (grad_b.size() != layer.b.size())
        throw ShapeError("sgd_step: grad_b length " +
                         std::to_string(grad_b.size()) + " vs bias length " +
                         std::to_string(layer.b.size()));
    if (n < 1)
        throw ConfigError("sgd_step: batch size must be >= 1");
    const double step = learning_rate / double(n);
    DenseLayer updated;
    updated.w = layer.w - step * grad_w;
    updated.b = layer.b - step * grad_b;
    return updated;
}

LayerGrads layer_grads(const DenseLayer& layer, const Matrix& x,
                       const Matrix& grad_h) {
    if (x.cols() != layer.w.rows())
        throw ShapeError("layer_grads: input " +
                         detail::shape_of(x.rows(), x.cols()) +
                         " does not match weights " +
                         detail::shape_of(layer.w.rows(), layer.w.cols()));
    if (grad_h.rows() != x.rows() || grad_h.cols() != layer.w.cols())
        throw ShapeError("layer_grads: grad_h is " +
                         detail::shape_of(grad_h.rows(), grad_h.cols()) +
                         ", expected " +
                         detail::shape_of(x.rows(), layer.w.cols()));
    const Matrix pre = add_row_broadcast(matmul(x, layer.w), layer.b);
    const Matrix masked =
        (pre.array() > 0.0).select(grad_h.array(), 0.0).matrix();
    LayerGrads grads;
    grads.w = matmul(x.transpose(), masked);
    grads.b = masked.colwise().sum().transpose();
    grads.x = matmul(masked, layer.w.transpose());
    return grads;
}

std::vector<Matrix> ff_batch_update(Network& net, const Matrix& x0,
                                    const LossSpec& spec,
                                    const TrainConfig& cfg, Index epoch) {
    std::vector<Matrix> fed_inputs;
    fed_inputs.reserve(net.layers.size());
    Matrix x = x0;
    for (Index l = 0; l < net.depth(); ++l) {
        DenseLayer& layer = net.layers[static_cast<std::size_t>(l)];
        const Matrix h = layer_forward(layer, x);
        const LossState state = calibrate_state(h, spec);
        const LossEval eval = evaluate(h, spec, state);
        if (!std::isfinite(eval.total))
            throw NumericError("training diverged: non-finite loss at " +
                               at_epoch_layer(epoch, l));
        const LayerGrads grads = layer_grads(layer, x, eval.grad_h);
        layer = sgd_step(layer, grads.w, grads.b, cfg.learning_rate,
                         x.rows());
        check_finite_params(net, epoch, l);
        Matrix next = cfg.ff_feed_pre_update ? h : layer_forward(layer, x);
        fed_inputs.push_back(std::move(x));
        x = std::move(next);
    }
    return fed_inputs;
}

void bp_batch_update(Network& net, const Matrix& x0, const LossSpec& spec,
                     const TrainConfig& cfg, Index epoch) {
    const Index depth = net.depth();
    const std::vector<Matrix> activations = forward_all(net, x0);

    std::vector<Matrix> loss_grads(static_cast<std::size_t>(depth));
    double total = 0.0;
    if (cfg.bp_sum_layer_losses) {
        for (Index l = 0; l < depth; ++l) {
            const Matrix& h = activations[static_cast<std::size_t>(l)];
            const LossEval eval = evaluate(h, spec, calibrate_state(h, spec));
            total += eval.total;
            loss_grads[static_cast<std::size_t>(l)] = eval.grad_h;
        }
    } else {
        const Matrix& h = activations.back();
        const LossEval eval = evaluate(h, spec, calibrate_state(h, spec));
        total = eval.total;
        loss_grads.back() = eval.grad_h;
    }
    if (!std::isfinite(total))
        throw NumericError("training diverged: non-finite loss at " +
                           at_epoch_layer(epoch, depth - 1));

    std::vector<LayerGrads> grads(static_cast<std::size_t>(depth));
    Matrix upstream;
    for (Index l = depth - 1; l >= 0; --l) {
        const Matrix& input =
            l == 0 ? x0 : activations[static_cast<std::size_t>(l - 1)];
        Matrix grad_h;
        if (l == depth - 1) {
            grad_h = loss_grads[static_cast<std::size_t>(l)];
        } else {
            grad_h = std::move(upstream);
            if (cfg.bp_sum_layer_losses)
                grad_h += loss_grads[static_cast<std::size_t>(l)];
        }
        LayerGrads g = layer_grads(net.layers[static_cast<std::size_t>(l)],
                                   input, grad_h);
        upstream = std::move(g.x);
        grads[static_cast<std::size_t>(l)] = std::move(g);
    }

    for (Index l = 0; l < depth; ++l) {
        const LayerGrads& g = grads[static_cast<std::size_t>(l)];
        net.layers[static_cast<std::size_t>(l)] =
            sgd_step(net.layers[static_cast<std::size_t>(l)], g.w, g.b,
                     cfg.learning_rate, x0.rows());
        check_finite_params(net, epoch, l);
    }
}

bool early_stop_check(const std::vector<double>& valid_losses,
                      Index patience) {
    if (patience < 1)
        throw ConfigError("early_stop_check: patience must be >= 1");
    if (valid_losses.empty())
        return false;
    std::size_t best = 0; // ties keep the earliest epoch
    for (std::size_t i = 1; i < valid_losses.size(); ++i)
        if (valid_losses[i] < valid_losses[best])
            best = i;
    return valid_losses.size() - 1 - best >
           static_cast<std::size_t>(patience);
}

namespace {

std::pair<TrainedModel, TrainReport> train_impl(Network net,
                                                const Matrix& x_train,
                                                const Matrix& x_valid,
                                                const LossSpec& spec,
                                                const TrainConfig& cfg) {
    cfg.validate();
    spec.validate();
    if (x_train.rows() == 0)
        throw DataError("train: empty training set");
    if (x_valid.rows() == 0)
        throw DataError("train: empty validation set");
    if (x_train.cols() != net.input_width() ||
        x_valid.cols() != net.input_width())
        throw ShapeError("train: data width " +
                         std::to_string(x_train.cols()) +
                         " does not match network input width " +
                         std::to_string(net.input_width()));

    const Index n_train = x_train.rows();
    SplitMix64 batch_rng(cfg.seed ^ kBatchStreamSalt);
    const bool full_batch =
        cfg.batch_size <= 0 || cfg.batch_size >= n_train;

    TrainReport report;
    for (Index epoch = 0; epoch < cfg.epochs_max; ++epoch) {
        const auto step = [&](const Matrix& xb) {
            if (cfg.regime == Regime::ForwardForward)
                ff_batch_update(net, xb, spec, cfg, epoch);
            else
                bp_batch_update(net, xb, spec, cfg, epoch);
        };
        if (full_batch) {
            step(x_train);
        } else {
            std::vector<Index> order(static_cast<std::size_t>(n_train));
            std::iota(order.begin(), order.end(), Index{0});
            shuffle(order, batch_rng);
            for (Index start = 0; start < n_train; start += cfg.batch_size) {
                const Index len = std::min(cfg.batch_size, n_train - start);
                const std::vector<Index> chunk(
                    order.begin() + start, order.begin() + start + len);
                step(gather_rows(x_train, chunk));
            }
        }

        // Frozen-model losses; the validation loss is measured under the
        // train-calibrated state, never its own.
        const std::vector<Matrix> h_train = forward_all(net, x_train);
        const LossState state = calibrate_state(h_train.back(), spec);
        const double train_loss =
            evaluate(h_train.back(), spec, state).total / double(n_train);
        const std::vector<Matrix> h_valid = forward_all(net, x_valid);
        const double valid_loss =
            evaluate(h_valid.back(), spec, state).total /
            double(x_valid.rows());
        if (!std::isfinite(train_loss) || !std::isfinite(valid_loss))
            throw NumericError(
                "training diverged: non-finite epoch loss at " +
                at_epoch_layer(epoch, net.depth() - 1));
        report.train_loss_curve.push_back(train_loss);
        report.valid_loss_curve.push_back(valid_loss);
        report.epochs_run = epoch + 1;
        if (early_stop_check(report.valid_loss_curve, cfg.patience)) {
            report.stopped_early = true;
            break;
        }
    }

    const std::vector<Matrix> h_final = forward_all(net, x_train);
    TrainedModel model;
    model.spec = spec;
    model.seed = cfg.seed;
    model.state = calibrate_state(h_final.back(), spec);
    model.calib = calibrate(
        distance_scores(h_final.back(), spec, model.state), cfg.nu);
    model.net = std::move(net);
    return {std::move(model), std::move(report)};
}

} // namespace

std::pair<TrainedModel, TrainReport> train_ff(const Network& net,
                                              const Matrix& x_train,
                                              const Matrix& x_valid,
                                              const LossSpec& spec,
                                              const TrainConfig& cfg) {
    if (cfg.regime != Regime::ForwardForward)
        throw ConfigError("train_ff: config regime is not ff");
    return train_impl(net, x_train, x_valid, spec, cfg);
}

std::pair<TrainedModel, TrainReport> train_bp(const Network& net,
                                              const Matrix& x_train,
                                              const Matrix& x_valid,
                                              const LossSpec& spec,
                                              const TrainConfig& cfg) {
    if (cfg.regime != Regime::Backprop)
        throw ConfigError("train_bp: config regime is not bp");
    return train_impl(net, x_train, x_valid, spec, cfg);
}

} // namespace ocff
