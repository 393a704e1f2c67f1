#include "ocff/landscape.hpp"

#include <fstream>

#include "ocff/rng.hpp"
#include "ocff/text.hpp"

namespace ocff {

namespace {

Matrix draw_direction(SplitMix64& rng, const Matrix& like) {
    Matrix d(like.rows(), like.cols());
    for (Index i = 0; i < d.rows(); ++i)
        for (Index j = 0; j < d.cols(); ++j)
            d(i, j) = rng.normal();
    return d;
}

// Scale each direction column to the norm of the matching weight column.
void filter_normalize(Matrix& d, const Matrix& w) {
    for (Index j = 0; j < d.cols(); ++j) {
        const double w_norm = w.col(j).norm();
        const double d_norm = d.col(j).norm();
        d.col(j) *= (d_norm > 0.0 ? w_norm / d_norm : 0.0);
    }
}

} // namespace

LandscapeGrid compute_landscape(const TrainedModel& model, Index layer,
                                const Matrix& data, double grid_radius,
                                Index steps, std::uint64_t direction_seed,
                                bool recalibrate_state) {
    if (layer < 0 || layer >= model.net.depth())
        throw ConfigError("compute_landscape: layer " +
                          std::to_string(layer) + " out of range, network "
                          "has " + std::to_string(model.net.depth()) +
                          " layers");
    if (steps < 3 || steps % 2 == 0)
        throw ConfigError("compute_landscape: steps must be odd and >= 3");
    if (!(grid_radius >= 0.0))
        throw ConfigError("compute_landscape: grid_radius must be >= 0");
    if (data.rows() == 0)
        throw DataError("compute_landscape: empty data");

    // Input to the probed layer with all earlier layers frozen.
    Matrix x = data;
    for (Index l = 0; l < layer; ++l)
        x = layer_forward(model.net.layers[static_cast<std::size_t>(l)], x);

    const DenseLayer& probed =
        model.net.layers[static_cast<std::size_t>(layer)];

    SplitMix64 rng(direction_seed);
    Matrix d1 = draw_direction(rng, probed.w);
    Matrix d2 = draw_direction(rng, probed.w);
    filter_normalize(d1, probed.w);
    filter_normalize(d2, probed.w);
    const double d1_sq = d1.cwiseProduct(d1).sum();
    if (d1_sq > 0.0)
        d2 -= (d1.cwiseProduct(d2).sum() / d1_sq) * d1;

    LandscapeGrid grid;
    grid.d1 = d1;
    grid.d2 = d2;
    grid.layer_index = layer;
    grid.direction_seed = direction_seed;
    grid.grid_radius = grid_radius;
    grid.state_recalibrated = recalibrate_state;
    const Index center = (steps - 1) / 2;
    const double unit = grid_radius / double(center);
    grid.alphas.resize(steps);
    grid.betas.resize(steps);
    for (Index i = 0; i < steps; ++i) {
        grid.alphas[i] = double(i - center) * unit;
        grid.betas[i] = double(i - center) * unit;
    }

    LossState held_state;
    if (!recalibrate_state)
        held_state = calibrate_state(layer_forward(probed, x), model.spec);

    grid.values.resize(steps, steps);
    DenseLayer perturbed;
    perturbed.b = probed.b;
    for (Index i = 0; i < steps; ++i) {
        for (Index j = 0; j < steps; ++j) {
            perturbed.w = probed.w + grid.alphas[i] * d1 + grid.betas[j] * d2;
            const Matrix h = layer_forward(perturbed, x);
            const LossState& state = recalibrate_state
                                         ? calibrate_state(h, model.spec)
                                         : held_state;
            grid.values(i, j) =
                evaluate(h, model.spec, state).total / double(h.rows());
        }
    }
    return grid;
}

void export_landscape(const LandscapeGrid& grid,
                      const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out)
        throw DataError("export_landscape: cannot open '" + csv_path + "'");
    out << "alpha,beta,loss\n";
    for (Index i = 0; i < grid.alphas.size(); ++i)
        for (Index j = 0; j < grid.betas.size(); ++j)
            out << full_precision(grid.alphas[i]) << ','
                << full_precision(grid.betas[j]) << ','
                << full_precision(grid.values(i, j)) << '\n';
    if (!out)
        throw DataError("export_landscape: write to '" + csv_path +
                        "' failed");
}

nlohmann::json landscape_sidecar(const LandscapeGrid& grid,
                                 const TrainedModel& model,
                                 Index n_samples) {
    return nlohmann::json{
        {"layer_index", grid.layer_index},
        {"architecture", model.net.architecture},
        {"loss",
         {{"kind", loss_kind_id(model.spec.kind)},
          {"c", model.spec.c},
          {"nu", model.spec.nu}}},
        {"model_seed", model.seed},
        {"direction_seed", grid.direction_seed},
        {"grid_radius", grid.grid_radius},
        {"steps", grid.alphas.size()},
        {"state_recalibrated", grid.state_recalibrated},
        {"n_samples", n_samples},
        {"direction_scheme",
         "gaussian, column norms matched to the weight columns, second "
         "direction orthogonalized against the first"}};
}

} // namespace ocff
