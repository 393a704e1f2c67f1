#pragma once

#include <string>

#include "ocff/tensor.hpp"

namespace ocff {

/// The five one-class goodness functions. The radius losses (Svdd, LsSvdd)
/// carry a soft-boundary radius in their state; the others do not.
enum class LossKind { Goodness, GoodnessAdjusted, HbSvdd, Svdd, LsSvdd };

constexpr LossKind kAllLossKinds[] = {LossKind::Goodness,
                                      LossKind::GoodnessAdjusted,
                                      LossKind::HbSvdd, LossKind::Svdd,
                                      LossKind::LsSvdd};

/// Machine-readable id: "goodness", "goodness_adjusted", "hb_svdd", "svdd",
/// "ls_svdd". Used in configs, CSV columns and file names.
const char* loss_kind_id(LossKind kind);

/// Display label: "Goodness", "GoodnessAdjusted", "HB-SVDD", "SVDD",
/// "LS-SVDD". Used in rendered summary tables.
const char* loss_kind_label(LossKind kind);

LossKind loss_kind_from_id(const std::string& id);

/// True for the losses whose state carries a radius (Svdd, LsSvdd).
bool loss_uses_radius(LossKind kind);

/// A loss choice plus its two constants. `c` is a squared-norm offset for
/// Goodness/GoodnessAdjusted and a penalty weight for Svdd/LsSvdd; `nu` is
/// the outlier budget that sets the radius quantile.
struct LossSpec {
    LossKind kind = LossKind::Goodness;
    double c = 2.0;
    double nu = 0.05;

    void validate() const;
};

/// Conventional constants per kind: c = 2 in the threshold role, c = 1 in
/// the penalty role, nu = 0.05 everywhere.
LossSpec default_loss_spec(LossKind kind);

/// Batch statistics the loss is anchored to: the activation center and, for
/// the radius losses, the squared radius. Treated as constants while
/// gradients are taken.
struct LossState {
    Vector center;
    double radius_sq = 0.0;
};

/// One loss evaluation: per-sample summands, batch total, and the gradient
/// of the total with respect to the activations.
///
/// For Svdd/LsSvdd the shared radius_sq term is part of `total` but excluded
/// from `per_sample`, so per-sample values stay comparable across samples.
struct LossEval {
    Vector per_sample;
    double total = 0.0;
    Matrix grad_h;
};

/// Center = column means of h; for the radius losses, radius_sq = the
/// (1-nu)-quantile of the squared center distances in this batch.
LossState calibrate_state(const Matrix& h, const LossSpec& spec);

/// Evaluate the chosen loss on a batch of activations, with `state` held
/// fixed. grad_h is analytic; hinge and kink subgradients are taken as 0.
LossEval evaluate(const Matrix& h, const LossSpec& spec,
                  const LossState& state);

/// Per-sample anomaly scores: the per_sample vector of evaluate(). Larger
/// means farther from the learned description of normal.
Vector distance_scores(const Matrix& h, const LossSpec& spec,
                       const LossState& state);

/// Central finite differences of evaluate().total against grad_h, entry by
/// entry. Returns the maximum relative error, falling back to absolute
/// error below 1e-8 magnitude.
double grad_check(const LossSpec& spec, const LossState& state,
                  const Matrix& h, double eps);

/// Numerically stable logistic function.
double sigmoid(double z);

/// Numerically stable log(1 + exp(z)).
double softplus(double z);

} // namespace ocff
