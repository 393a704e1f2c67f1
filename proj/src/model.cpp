#include "ocff/model.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace ocff {

using nlohmann::json;

Scores score_and_flag(const TrainedModel& model, const Matrix& x) {
    if (!model.calib.valid())
        throw ConfigError("score_and_flag: model carries no calibration");
    const std::vector<Matrix> activations = forward_all(model.net, x);
    Scores scores;
    scores.distance = distance_scores(activations.back(), model.spec,
                                      model.state);
    scores.probability = to_probabilities(scores.distance, model.calib);
    scores.flags = flag_outliers(scores.probability, model.calib);
    return scores;
}

std::string encode_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double decode_double(const json& j) {
    if (j.is_number())
        return j.get<double>();
    if (!j.is_string())
        throw DataError("model: expected a number or hex-float string");
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw DataError("model: cannot parse float '" + s + "'");
    return v;
}

namespace {

json encode_vector(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i)
        arr.push_back(encode_double(v[i]));
    return arr;
}

json encode_matrix_rowmajor(const Matrix& m) {
    json arr = json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            arr.push_back(encode_double(m(i, j)));
    return arr;
}

Vector decode_vector(const json& arr, Index expected_len, const char* what) {
    if (!arr.is_array() || static_cast<Index>(arr.size()) != expected_len)
        throw DataError("model: " + std::string(what) + " must be an array "
                        "of length " + std::to_string(expected_len));
    Vector v(expected_len);
    for (Index i = 0; i < expected_len; ++i)
        v[i] = decode_double(arr[static_cast<std::size_t>(i)]);
    return v;
}

Matrix decode_matrix_rowmajor(const json& arr, Index rows, Index cols,
                              const char* what) {
    if (!arr.is_array() || static_cast<Index>(arr.size()) != rows * cols)
        throw DataError("model: " + std::string(what) + " must be an array "
                        "of length " + std::to_string(rows * cols));
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            m(i, j) = decode_double(arr[k++]);
    return m;
}

const json& require(const json& doc, const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end())
        throw DataError("model: missing key '" + std::string(key) + "'");
    return *it;
}

} // namespace

json model_to_json(const TrainedModel& model, const json& meta) {
    json doc;
    doc["format"] = "ocff-model";
    doc["version"] = 1;
    doc["architecture"] = model.net.architecture;
    doc["seed"] = model.seed;
    doc["loss"] = {{"kind", loss_kind_id(model.spec.kind)},
                   {"c", encode_double(model.spec.c)},
                   {"nu", encode_double(model.spec.nu)}};
    json layers = json::array();
    for (const DenseLayer& layer : model.net.layers)
        layers.push_back({{"w", encode_matrix_rowmajor(layer.w)},
                          {"b", encode_vector(layer.b)}});
    doc["layers"] = std::move(layers);
    doc["state"] = {{"center", encode_vector(model.state.center)},
                    {"radius_sq", encode_double(model.state.radius_sq)}};
    doc["calibration"] = {
        {"train_max_distance", encode_double(model.calib.train_max_distance)},
        {"threshold", encode_double(model.calib.threshold)},
        {"nu", encode_double(model.calib.nu)}};
    if (!meta.is_null())
        doc["meta"] = meta;
    return doc;
}

TrainedModel model_from_json(const json& doc, json* meta_out) {
    if (!doc.is_object() || doc.value("format", "") != "ocff-model")
        throw DataError("model: not an ocff-model document");
    if (doc.value("version", 0) != 1)
        throw DataError("model: unsupported version");

    TrainedModel model;
    const json& arch = require(doc, "architecture");
    if (!arch.is_array() || arch.size() < 2)
        throw DataError("model: architecture must list at least two widths");
    model.net.architecture = arch.get<std::vector<Index>>();
    model.seed = require(doc, "seed").get<std::uint64_t>();

    const json& loss = require(doc, "loss");
    model.spec.kind =
        loss_kind_from_id(require(loss, "kind").get<std::string>());
    model.spec.c = decode_double(require(loss, "c"));
    model.spec.nu = decode_double(require(loss, "nu"));
    model.spec.validate();

    const json& layers = require(doc, "layers");
    if (!layers.is_array() ||
        layers.size() + 1 != model.net.architecture.size())
        throw DataError("model: layer count does not match architecture");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Index p = model.net.architecture[l];
        const Index q = model.net.architecture[l + 1];
        DenseLayer layer;
        layer.w = decode_matrix_rowmajor(require(layers[l], "w"), p, q, "w");
        layer.b = decode_vector(require(layers[l], "b"), q, "b");
        model.net.layers.push_back(std::move(layer));
    }

    const json& state = require(doc, "state");
    model.state.center = decode_vector(require(state, "center"),
                                       model.net.architecture.back(),
                                       "state.center");
    model.state.radius_sq = decode_double(require(state, "radius_sq"));

    const json& calib = require(doc, "calibration");
    model.calib.train_max_distance =
        decode_double(require(calib, "train_max_distance"));
    model.calib.threshold = decode_double(require(calib, "threshold"));
    model.calib.nu = decode_double(require(calib, "nu"));

    if (meta_out)
        *meta_out = doc.value("meta", json());
    return model;
}

void save_model(const std::string& path, const TrainedModel& model,
                const json& meta) {
    std::ofstream out(path);
    if (!out)
        throw DataError("save_model: cannot open '" + path + "' for write");
    out << model_to_json(model, meta).dump(2) << "\n";
    if (!out)
        throw DataError("save_model: write to '" + path + "' failed");
}

TrainedModel load_model(const std::string& path, json* meta_out) {
    std::ifstream in(path);
    if (!in)
        throw DataError("load_model: cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("load_model: '" + path + "' is not valid JSON: " +
                        e.what());
    }
    return model_from_json(doc, meta_out);
}

} // namespace ocff
