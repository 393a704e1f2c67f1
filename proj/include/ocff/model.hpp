#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ocff/losses.hpp"
#include "ocff/network.hpp"
#include "ocff/scoring.hpp"

namespace ocff {

/// A trained layer stack together with everything inference needs: the loss
/// it was trained under, the final loss state (center, radius) and the
/// decision calibration (training max distance, threshold).
struct TrainedModel {
    Network net;
    LossSpec spec;
    LossState state;
    Calibration calib;
    std::uint64_t seed = 0;
};

/// Batch scoring output: raw distances, normalized probabilities and the
/// resulting outlier flags.
struct Scores {
    Vector distance;
    Vector probability;
    IntVector flags;
};

/// Forward the batch, score the final activations and flag P > threshold.
/// Requires a calibrated model.
Scores score_and_flag(const TrainedModel& model, const Matrix& x);

/// JSON round-trip. Every float is encoded as a hex-float string so the
/// round-trip is bit-faithful; `meta` is an opaque caller payload carried
/// alongside (pipeline settings, provenance).
nlohmann::json model_to_json(const TrainedModel& model,
                             const nlohmann::json& meta);
TrainedModel model_from_json(const nlohmann::json& doc,
                             nlohmann::json* meta_out = nullptr);

void save_model(const std::string& path, const TrainedModel& model,
                const nlohmann::json& meta);
TrainedModel load_model(const std::string& path,
                        nlohmann::json* meta_out = nullptr);

/// Hex-float codec shared by the model format and other bit-faithful
/// outputs.
std::string encode_double(double v);
double decode_double(const nlohmann::json& j);

} // namespace ocff
