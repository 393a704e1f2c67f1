#include "ocff/losses.hpp"

#include <cmath>

namespace ocff {

const char* loss_kind_id(LossKind kind) {
    switch (kind) {
    case LossKind::Goodness: return "goodness";
    case LossKind::GoodnessAdjusted: return "goodness_adjusted";
    case LossKind::HbSvdd: return "hb_svdd";
    case LossKind::Svdd: return "svdd";
    case LossKind::LsSvdd: return "ls_svdd";
    }
    throw ConfigError("loss_kind_id: unknown kind");
}

const char* loss_kind_label(LossKind kind) {
    switch (kind) {
    case LossKind::Goodness: return "Goodness";
    case LossKind::GoodnessAdjusted: return "GoodnessAdjusted";
    case LossKind::HbSvdd: return "HB-SVDD";
    case LossKind::Svdd: return "SVDD";
    case LossKind::LsSvdd: return "LS-SVDD";
    }
    throw ConfigError("loss_kind_label: unknown kind");
}

LossKind loss_kind_from_id(const std::string& id) {
    for (LossKind k : kAllLossKinds)
        if (id == loss_kind_id(k))
            return k;
    throw ConfigError("unknown loss kind '" + id +
                      "' (expected goodness, goodness_adjusted, hb_svdd, "
                      "svdd or ls_svdd)");
}

bool loss_uses_radius(LossKind kind) {
    return kind == LossKind::Svdd || kind == LossKind::LsSvdd;
}

void LossSpec::validate() const {
    if (!(nu > 0.0 && nu < 1.0))
        throw ConfigError("loss spec: nu must lie in (0,1), got " +
                          std::to_string(nu));
    if (!std::isfinite(c))
        throw ConfigError("loss spec: c must be finite");
    if (loss_uses_radius(kind) && !(c > 0.0))
        throw ConfigError(
            "loss spec: penalty weight c must be positive for " +
            std::string(loss_kind_id(kind)));
}

LossSpec default_loss_spec(LossKind kind) {
    LossSpec spec;
    spec.kind = kind;
    spec.c = loss_uses_radius(kind) ? 1.0 : 2.0;
    spec.nu = 0.05;
    return spec;
}

double sigmoid(double z) {
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) {
    if (z > 0.0)
        return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

LossState calibrate_state(const Matrix& h, const LossSpec& spec) {
    spec.validate();
    if (h.rows() == 0)
        throw DataError("calibrate_state: empty batch");
    LossState state;
    state.center = col_means(h);
    state.radius_sq = 0.0;
    if (loss_uses_radius(spec.kind)) {
        const Matrix diff = h.rowwise() - state.center.transpose();
        state.radius_sq = quantile(row_sq_norms(diff), 1.0 - spec.nu);
    }
    return state;
}

LossEval evaluate(const Matrix& h, const LossSpec& spec,
                  const LossState& state) {
    spec.validate();
    if (state.center.size() != h.cols())
        throw ShapeError(
            "evaluate: state calibrated for width " +
            std::to_string(state.center.size()) + ", activations are " +
            detail::shape_of(h.rows(), h.cols()));

    const Index n = h.rows();
    LossEval out;
    out.per_sample.resize(n);
    out.grad_h.setZero(h.rows(), h.cols());

    switch (spec.kind) {
    case LossKind::Goodness: {
        const Vector sq = row_sq_norms(h);
        for (Index i = 0; i < n; ++i) {
            const double s = sigmoid(sq[i] - spec.c);
            out.per_sample[i] = s;
            out.grad_h.row(i) = (2.0 * s * (1.0 - s)) * h.row(i);
        }
        out.total = out.per_sample.sum();
        break;
    }
    case LossKind::GoodnessAdjusted: {
        const Vector sq = row_sq_norms(h);
        for (Index i = 0; i < n; ++i) {
            const double z = sq[i] - spec.c;
            out.per_sample[i] = softplus(z);
            out.grad_h.row(i) = (2.0 * sigmoid(z)) * h.row(i);
        }
        out.total = out.per_sample.sum();
        break;
    }
    case LossKind::HbSvdd: {
        const Matrix diff = h.rowwise() - state.center.transpose();
        out.per_sample = row_sq_norms(diff);
        out.grad_h = 2.0 * diff;
        out.total = out.per_sample.sum();
        break;
    }
    case LossKind::Svdd: {
        const Matrix diff = h.rowwise() - state.center.transpose();
        const Vector sq = row_sq_norms(diff);
        for (Index i = 0; i < n; ++i) {
            const double excess = sq[i] - state.radius_sq;
            if (excess > 0.0) {
                out.per_sample[i] = spec.c * excess;
                out.grad_h.row(i) = (2.0 * spec.c) * diff.row(i);
            } else {
                out.per_sample[i] = 0.0; // hinge inactive; 0 at the kink too
            }
        }
        out.total = state.radius_sq + out.per_sample.sum();
        break;
    }
    case LossKind::LsSvdd: {
        const Matrix diff = h.rowwise() - state.center.transpose();
        const Vector sq = row_sq_norms(diff);
        for (Index i = 0; i < n; ++i) {
            const double excess = sq[i] - state.radius_sq;
            out.per_sample[i] = 0.5 * spec.c * excess * excess;
            out.grad_h.row(i) = (2.0 * spec.c * excess) * diff.row(i);
        }
        out.total = state.radius_sq + out.per_sample.sum();
        break;
    }
    }
    return out;
}

Vector distance_scores(const Matrix& h, const LossSpec& spec,
                       const LossState& state) {
    return evaluate(h, spec, state).per_sample;
}

double grad_check(const LossSpec& spec, const LossState& state,
                  const Matrix& h, double eps) {
    if (!(eps > 0.0))
        throw ConfigError("grad_check: eps must be positive");
    const LossEval base = evaluate(h, spec, state);
    Matrix probe = h;
    double worst = 0.0;
    for (Index r = 0; r < h.rows(); ++r) {
        for (Index c = 0; c < h.cols(); ++c) {
            const double kept = probe(r, c);
            probe(r, c) = kept + eps;
            const double up = evaluate(probe, spec, state).total;
            probe(r, c) = kept - eps;
            const double down = evaluate(probe, spec, state).total;
            probe(r, c) = kept;
            const double fd = (up - down) / (2.0 * eps);
            const double an = base.grad_h(r, c);
            const double scale = std::max(std::abs(fd), std::abs(an));
            const double err =
                scale < 1e-8 ? std::abs(fd - an) : std::abs(fd - an) / scale;
            worst = std::max(worst, err);
        }
    }
    return worst;
}

} // namespace ocff
