#pragma once

#include <cstdint>
#include <string>

#include "ocff/model.hpp"

namespace ocff {

/// A 2-D slice of one layer's loss surface: the layer's weights are
/// perturbed along two fixed random directions while every other layer
/// stays frozen.
struct LandscapeGrid {
    Index layer_index = 0;
    Vector alphas;
    Vector betas;
    /// Per-sample mean loss at W + alpha D1 + beta D2; |alphas| x |betas|.
    Matrix values;
    /// The two perturbation directions actually used, post-normalization.
    Matrix d1;
    Matrix d2;
    std::uint64_t direction_seed = 0;
    double grid_radius = 0.0;
    bool state_recalibrated = true;
};

/// Directions are drawn from SplitMix64(direction_seed), column-normalized
/// to the corresponding weight-column norms (the dense analogue of filter
/// normalization) and orthogonalized. `steps` must be odd so the center
/// cell sits exactly at the unperturbed weights. With recalibrate_state the
/// loss state is refitted at every grid point; otherwise it is fitted once
/// at the center and held.
LandscapeGrid compute_landscape(const TrainedModel& model, Index layer,
                                const Matrix& data, double grid_radius,
                                Index steps, std::uint64_t direction_seed,
                                bool recalibrate_state = true);

/// CSV with header alpha,beta,loss; cells in row-major order over alphas
/// then betas, full precision.
void export_landscape(const LandscapeGrid& grid, const std::string& csv_path);

/// JSON sidecar describing how the grid was produced.
nlohmann::json landscape_sidecar(const LandscapeGrid& grid,
                                 const TrainedModel& model, Index n_samples);

} // namespace ocff
