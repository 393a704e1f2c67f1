#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ocff/model.hpp"

namespace ocff {

/// ForwardForward trains each layer against its own loss the moment its
/// activations exist; Backprop evaluates the loss once at the top and chains
/// gradients down through every layer.
enum class Regime { ForwardForward, Backprop };

const char* regime_id(Regime regime); // "ff" / "bp"
Regime regime_from_id(const std::string& id);

struct TrainConfig {
    Regime regime = Regime::ForwardForward;
    double learning_rate = 0.015;
    Index epochs_max = 200;
    /// 0 means full-batch; anything else mini-batches with seeded shuffling.
    Index batch_size = 0;
    Index patience = 10;
    /// Outlier budget for the post-training threshold calibration.
    double nu = 0.05;
    std::uint64_t seed = 1;
    /// Feed layer l+1 the pre-update output of layer l instead of
    /// recomputing with the just-updated weights.
    bool ff_feed_pre_update = false;
    /// Ablation: in Backprop, sum per-layer losses instead of taking the
    /// final layer's loss only.
    bool bp_sum_layer_losses = false;

    void validate() const;
};

struct TrainReport {
    Index epochs_run = 0;
    /// Per-sample mean loss of the frozen model at each epoch end; the
    /// validation curve uses the train-calibrated loss state.
    std::vector<double> train_loss_curve;
    std::vector<double> valid_loss_curve;
    bool stopped_early = false;
};

/// (epoch, train_loss, valid_loss) rows at full precision.
void write_report_csv(const TrainReport& report, const std::string& path);

/// W <- W - (lr/n) grad_w and b <- b - (lr/n) grad_b; plain SGD, no momentum
/// or weight decay.
DenseLayer sgd_step(const DenseLayer& layer, const Matrix& grad_w,
                    const Vector& grad_b, double learning_rate, Index n);

struct LayerGrads {
    Matrix w;
    Vector b;
    Matrix x;
};

/// Chain rule through one layer: mask grad_h where the pre-activation was
/// not strictly positive, then grad_w = x^T g, grad_b = column sums of g,
/// grad_x = g W^T.
LayerGrads layer_grads(const DenseLayer& layer, const Matrix& x,
                       const Matrix& grad_h);

/// One forward-forward pass over a batch: per layer, forward, calibrate,
/// evaluate, update, then feed the updated layer's output onward. Returns
/// the input each layer actually saw (useful for tracing).
std::vector<Matrix> ff_batch_update(Network& net, const Matrix& x0,
                                    const LossSpec& spec,
                                    const TrainConfig& cfg, Index epoch);

/// One backprop step over a batch: full forward, loss at the top, gradients
/// chained down, one optimizer step over all layers.
void bp_batch_update(Network& net, const Matrix& x0, const LossSpec& spec,
                     const TrainConfig& cfg, Index epoch);

/// True iff the running minimum of the validation losses is more than
/// `patience` epochs old.
bool early_stop_check(const std::vector<double>& valid_losses,
                      Index patience);

std::pair<TrainedModel, TrainReport> train_ff(const Network& net,
                                              const Matrix& x_train,
                                              const Matrix& x_valid,
                                              const LossSpec& spec,
                                              const TrainConfig& cfg);

std::pair<TrainedModel, TrainReport> train_bp(const Network& net,
                                              const Matrix& x_train,
                                              const Matrix& x_valid,
                                              const LossSpec& spec,
                                              const TrainConfig& cfg);

} // namespace ocff
