// Command-line front end: train, eval, grid, landscape, summarize.
//
// Everything is driven by a JSON config plus flag overrides (flags win).
// Every command writes a metadata JSON capturing the fully resolved
// configuration, so a run can be reproduced from its outputs alone.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocff/data.hpp"
#include "ocff/experiments.hpp"
#include "ocff/landscape.hpp"
#include "ocff/model.hpp"
#include "ocff/text.hpp"
#include "ocff/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ocff;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("OCFF_OUT_DIR");
    return env && *env ? env : "out";
}

struct PipelineConfig {
    std::string data_path;
    std::string out_dir = default_out_dir();
    LossSpec loss = default_loss_spec(LossKind::Goodness);
    std::vector<Index> arch = {4, 10, 10};
    TrainConfig train;
    std::uint64_t split_seed = 0;
    SplitFractions fractions;
    OneClassMode oneclass = OneClassMode::Discard;
    bool standardize_features = true;
    GridSpec grid = GridSpec::paper_default();
    int workers = 0;
};

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed)
            known |= key == a;
        if (!known)
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

LossSpec parse_loss_json(const json& j, const std::string& where) {
    if (j.is_string())
        return default_loss_spec(loss_kind_from_id(j.get<std::string>()));
    if (!j.is_object())
        throw ConfigError(where + ": loss must be a string or object");
    check_keys(j, {"kind", "c", "nu"}, where);
    LossSpec spec = default_loss_spec(
        loss_kind_from_id(j.at("kind").get<std::string>()));
    if (j.contains("c"))
        spec.c = j.at("c").get<double>();
    if (j.contains("nu"))
        spec.nu = j.at("nu").get<double>();
    spec.validate();
    return spec;
}

void parse_train_json(const json& j, TrainConfig& cfg) {
    check_keys(j,
               {"regime", "learning_rate", "epochs_max", "batch_size",
                "patience", "nu", "seed", "ff_feed_pre_update",
                "bp_sum_layer_losses"},
               "train");
    if (j.contains("regime"))
        cfg.regime = regime_from_id(j.at("regime").get<std::string>());
    if (j.contains("learning_rate"))
        cfg.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("epochs_max"))
        cfg.epochs_max = j.at("epochs_max").get<Index>();
    if (j.contains("batch_size"))
        cfg.batch_size = j.at("batch_size").get<Index>();
    if (j.contains("patience"))
        cfg.patience = j.at("patience").get<Index>();
    if (j.contains("nu"))
        cfg.nu = j.at("nu").get<double>();
    if (j.contains("seed"))
        cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("ff_feed_pre_update"))
        cfg.ff_feed_pre_update = j.at("ff_feed_pre_update").get<bool>();
    if (j.contains("bp_sum_layer_losses"))
        cfg.bp_sum_layer_losses = j.at("bp_sum_layer_losses").get<bool>();
}

void parse_split_json(const json& j, PipelineConfig& cfg) {
    check_keys(j, {"seed", "fractions", "oneclass", "standardize"}, "split");
    if (j.contains("seed"))
        cfg.split_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("fractions")) {
        const auto f = j.at("fractions").get<std::vector<double>>();
        if (f.size() != 3)
            throw ConfigError("split.fractions needs 3 entries");
        cfg.fractions = {f[0], f[1], f[2]};
    }
    if (j.contains("oneclass")) {
        const json& oc = j.at("oneclass");
        cfg.oneclass = oc.is_boolean()
                           ? (oc.get<bool>() ? OneClassMode::MoveToTest
                                             : OneClassMode::Off)
                           : one_class_mode_from_id(oc.get<std::string>());
    }
    if (j.contains("standardize"))
        cfg.standardize_features = j.at("standardize").get<bool>();
}

void parse_grid_json(const json& j, PipelineConfig& cfg) {
    check_keys(j, {"losses", "architectures", "regimes", "seeds", "workers"},
               "grid");
    if (j.contains("losses")) {
        cfg.grid.losses.clear();
        for (const json& l : j.at("losses"))
            cfg.grid.losses.push_back(parse_loss_json(l, "grid.losses"));
    }
    if (j.contains("architectures")) {
        cfg.grid.architectures.clear();
        for (const json& a : j.at("architectures"))
            cfg.grid.architectures.push_back(a.get<std::vector<Index>>());
    }
    if (j.contains("regimes")) {
        cfg.grid.regimes.clear();
        for (const json& r : j.at("regimes"))
            cfg.grid.regimes.push_back(
                regime_from_id(r.get<std::string>()));
    }
    if (j.contains("seeds")) {
        cfg.grid.seeds.clear();
        const json& s = j.at("seeds");
        if (s.is_array()) {
            for (const json& v : s)
                cfg.grid.seeds.push_back(v.get<std::uint64_t>());
        } else {
            check_keys(s, {"from", "to"}, "grid.seeds");
            const auto from = s.at("from").get<std::uint64_t>();
            const auto to = s.at("to").get<std::uint64_t>();
            if (to < from)
                throw ConfigError("grid.seeds: to < from");
            for (std::uint64_t v = from; v <= to; ++v)
                cfg.grid.seeds.push_back(v);
        }
    }
    if (j.contains("workers"))
        cfg.workers = j.at("workers").get<int>();
}

PipelineConfig load_config(const std::string& path) {
    PipelineConfig cfg;
    if (path.empty())
        return cfg;
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " +
                          e.what());
    }
    check_keys(doc, {"data", "out_dir", "loss", "arch", "train", "split",
                     "grid"},
               "config");
    if (doc.contains("data"))
        cfg.data_path = doc.at("data").get<std::string>();
    if (doc.contains("out_dir"))
        cfg.out_dir = doc.at("out_dir").get<std::string>();
    if (doc.contains("loss"))
        cfg.loss = parse_loss_json(doc.at("loss"), "loss");
    if (doc.contains("arch"))
        cfg.arch = doc.at("arch").get<std::vector<Index>>();
    if (doc.contains("train"))
        parse_train_json(doc.at("train"), cfg.train);
    if (doc.contains("split"))
        parse_split_json(doc.at("split"), cfg);
    if (doc.contains("grid"))
        parse_grid_json(doc.at("grid"), cfg);
    return cfg;
}

std::vector<Index> parse_arch_flag(const std::string& s) {
    std::vector<Index> widths;
    for (const std::string& part : split(s, ','))
        widths.push_back(
            static_cast<Index>(parse_int_strict(part, "--arch")));
    if (widths.size() < 2)
        throw ConfigError("--arch needs at least two widths");
    return widths;
}

struct PreparedData {
    Dataset ds;
    Splits splits;
    Matrix x_train, x_valid, x_test;
    IntVector y_train, y_valid, y_test;
};

PreparedData prepare_data(const PipelineConfig& cfg) {
    if (cfg.data_path.empty())
        throw ConfigError("no dataset given; pass --data or set it in the "
                          "config");
    PreparedData prepared;
    prepared.ds = load_banknote(cfg.data_path);
    if (!has_canonical_banknote_counts(prepared.ds))
        std::cerr << "note: '" << cfg.data_path << "' has "
                  << prepared.ds.size() << " rows ("
                  << prepared.ds.positives()
                  << " positive), not the canonical 1372/610\n";
    prepared.splits = make_splits(prepared.ds, cfg.fractions, cfg.split_seed,
                                  cfg.oneclass);
    const auto maybe_standardize = [&](const Matrix& m) {
        return cfg.standardize_features ? standardize(prepared.splits, m)
                                        : m;
    };
    prepared.x_train = maybe_standardize(
        gather_rows(prepared.ds.features, prepared.splits.train));
    prepared.x_valid = maybe_standardize(
        gather_rows(prepared.ds.features, prepared.splits.valid));
    prepared.x_test = maybe_standardize(
        gather_rows(prepared.ds.features, prepared.splits.test));
    prepared.y_train = gather_labels(prepared.ds.labels,
                                     prepared.splits.train);
    prepared.y_valid = gather_labels(prepared.ds.labels,
                                     prepared.splits.valid);
    prepared.y_test = gather_labels(prepared.ds.labels,
                                    prepared.splits.test);
    return prepared;
}

json encode_vector_hex(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i)
        arr.push_back(encode_double(v[i]));
    return arr;
}

Vector decode_vector_hex(const json& arr) {
    Vector v(static_cast<Index>(arr.size()));
    for (Index i = 0; i < v.size(); ++i)
        v[i] = decode_double(arr[std::size_t(i)]);
    return v;
}

json pipeline_meta(const PipelineConfig& cfg, const PreparedData& prepared) {
    json meta;
    meta["data"] = cfg.data_path;
    meta["data_rows"] = prepared.ds.size();
    meta["data_positives"] = prepared.ds.positives();
    meta["split"] = {{"seed", cfg.split_seed},
                     {"fractions",
                      {cfg.fractions.train, cfg.fractions.valid,
                       cfg.fractions.test}},
                     {"oneclass", one_class_mode_id(cfg.oneclass)}};
    meta["standardize"] = cfg.standardize_features;
    if (cfg.standardize_features) {
        meta["standardizer"] = {
            {"mean", encode_vector_hex(prepared.splits.standardizer.mean)},
            {"std",
             encode_vector_hex(prepared.splits.standardizer.stddev)}};
    }
    meta["train"] = {{"regime", regime_id(cfg.train.regime)},
                     {"learning_rate", cfg.train.learning_rate},
                     {"epochs_max", cfg.train.epochs_max},
                     {"batch_size", cfg.train.batch_size},
                     {"patience", cfg.train.patience},
                     {"nu", cfg.train.nu},
                     {"seed", cfg.train.seed},
                     {"ff_feed_pre_update", cfg.train.ff_feed_pre_update},
                     {"bp_sum_layer_losses", cfg.train.bp_sum_layer_losses}};
    meta["loss"] = {{"kind", loss_kind_id(cfg.loss.kind)},
                    {"c", cfg.loss.c},
                    {"nu", cfg.loss.nu}};
    meta["arch"] = cfg.arch;
    return meta;
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open '" + path.string() + "' for write");
    out << doc.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open '" + path.string() + "' for write");
    out << body;
}

void write_split_indices(const fs::path& dir, const Splits& splits) {
    fs::create_directories(dir);
    write_index_file((dir / "train.idx").string(), splits.train);
    write_index_file((dir / "valid.idx").string(), splits.valid);
    write_index_file((dir / "test.idx").string(), splits.test);
}

json metrics_json(const MetricTriple& m) {
    return {{"accuracy", m.accuracy}, {"f1", m.f1}, {"auc", m.auc}};
}

// ---------------------------------------------------------------- train --

int cmd_train(const PipelineConfig& cfg) {
    const PreparedData prepared = prepare_data(cfg);
    if (cfg.arch.front() != prepared.x_train.cols())
        throw ConfigError("architecture input width " +
                          std::to_string(cfg.arch.front()) +
                          " does not match the data's " +
                          std::to_string(prepared.x_train.cols()) +
                          " features");

    const Network net = init_network(cfg.arch, cfg.train.seed);
    auto [model, report] =
        cfg.train.regime == Regime::ForwardForward
            ? train_ff(net, prepared.x_train, prepared.x_valid, cfg.loss,
                       cfg.train)
            : train_bp(net, prepared.x_train, prepared.x_valid, cfg.loss,
                       cfg.train);

    const Scores scored = score_and_flag(model, prepared.x_test);
    MetricTriple metrics;
    metrics.accuracy = accuracy(scored.flags, prepared.y_test);
    metrics.f1 = f1_score(scored.flags, prepared.y_test);
    metrics.auc = auc(scored.probability, prepared.y_test);

    fs::create_directories(cfg.out_dir);
    json meta = pipeline_meta(cfg, prepared);
    meta["epochs_run"] = report.epochs_run;
    meta["stopped_early"] = report.stopped_early;
    meta["test_metrics"] = metrics_json(metrics);

    const fs::path out(cfg.out_dir);
    save_model((out / "model.json").string(), model, meta);
    write_report_csv(report, (out / "report.csv").string());
    write_json(out / "run_meta.json", meta);
    write_split_indices(out / "splits", prepared.splits);

    std::cout << "trained " << loss_kind_id(cfg.loss.kind) << " "
              << arch_id(cfg.arch) << " " << regime_id(cfg.train.regime)
              << " seed " << cfg.train.seed << ": epochs "
              << report.epochs_run << (report.stopped_early ? " (early)" : "")
              << ", test accuracy=" << full_precision(metrics.accuracy)
              << " f1=" << full_precision(metrics.f1)
              << " auc=" << full_precision(metrics.auc) << '\n'
              << "model: " << (out / "model.json").string() << '\n';
    return 0;
}

// ----------------------------------------------------------------- eval --

struct EvalSelection {
    std::vector<Index> rows;
    std::string name;
};

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& split_name, const std::string& out_dir,
             bool batch_norm) {
    json meta;
    const TrainedModel model = load_model(model_path, &meta);
    if (meta.is_null())
        throw DataError("model '" + model_path +
                        "' carries no pipeline metadata; cannot rebuild "
                        "the evaluation split");

    const Dataset ds = load_banknote(data_path);
    SplitFractions fractions;
    const json& fr = meta.at("split").at("fractions");
    fractions = {fr[0].get<double>(), fr[1].get<double>(),
                 fr[2].get<double>()};
    const Splits splits = make_splits(
        ds, fractions, meta.at("split").at("seed").get<std::uint64_t>(),
        one_class_mode_from_id(
            meta.at("split").at("oneclass").get<std::string>()));

    EvalSelection selection;
    if (split_name == "train")
        selection = {splits.train, "train"};
    else if (split_name == "valid")
        selection = {splits.valid, "valid"};
    else if (split_name == "test")
        selection = {splits.test, "test"};
    else if (split_name == "all") {
        selection.name = "all";
        for (Index i = 0; i < ds.size(); ++i)
            selection.rows.push_back(i);
    } else {
        throw ConfigError("unknown split '" + split_name +
                          "' (expected train, valid, test or all)");
    }

    Matrix x = gather_rows(ds.features, selection.rows);
    if (meta.at("standardize").get<bool>()) {
        Standardizer standardizer;
        standardizer.mean =
            decode_vector_hex(meta.at("standardizer").at("mean"));
        standardizer.stddev =
            decode_vector_hex(meta.at("standardizer").at("std"));
        x = standardizer.apply(x);
    }
    const IntVector labels = gather_labels(ds.labels, selection.rows);
    Scores scored = score_and_flag(model, x);
    if (batch_norm) {
        scored.probability = to_probabilities_batch_max(scored.distance);
        scored.flags = flag_outliers(scored.probability, model.calib);
    }

    MetricTriple metrics;
    metrics.accuracy = accuracy(scored.flags, labels);
    metrics.f1 = f1_score(scored.flags, labels);
    bool auc_defined = labels.minCoeff() != labels.maxCoeff();
    metrics.auc = auc_defined
                      ? auc(scored.probability, labels)
                      : std::numeric_limits<double>::quiet_NaN();
    if (!auc_defined)
        std::cerr << "note: split '" << selection.name
                  << "' is single-class; auc undefined\n";

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    std::ostringstream dump;
    dump << "sample_id,distance,probability,flag,label\n";
    for (Index i = 0; i < scored.distance.size(); ++i)
        dump << selection.rows[std::size_t(i)] << ','
             << full_precision(scored.distance[i]) << ','
             << full_precision(scored.probability[i]) << ','
             << scored.flags[i] << ',' << labels[i] << '\n';
    write_text(out / "scores.csv", dump.str());

    json eval_meta;
    eval_meta["model"] = model_path;
    eval_meta["data"] = data_path;
    eval_meta["split"] = selection.name;
    eval_meta["rows"] = scored.distance.size();
    eval_meta["flagged"] = scored.flags.sum();
    eval_meta["metrics"] = metrics_json(metrics);
    write_json(out / "eval_meta.json", eval_meta);

    std::cout << "eval split=" << selection.name << " rows="
              << scored.distance.size()
              << " accuracy=" << full_precision(metrics.accuracy)
              << " f1=" << full_precision(metrics.f1)
              << " auc=" << full_precision(metrics.auc) << '\n'
              << "scores: " << (out / "scores.csv").string() << '\n';
    return 0;
}

// ----------------------------------------------------------------- grid --

int cmd_grid(PipelineConfig cfg, bool fresh) {
    cfg.grid.base = cfg.train;
    cfg.grid.validate();
    const PreparedData prepared = prepare_data(cfg);

    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    const std::string results_csv = (out / "results.csv").string();
    if (fresh)
        fs::remove(results_csv);

    const auto started = std::chrono::steady_clock::now();
    const std::vector<ExperimentRecord> records =
        run_grid(cfg.grid, prepared.ds, prepared.splits, results_csv,
                 cfg.workers);
    const auto wall_s =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::steady_clock::now() - started)
            .count();

    const SummaryMap summaries = summarize(records);
    write_text(out / "summary.csv", emit_tables(summaries, TableFormat::Csv));
    write_text(out / "summary.md",
               emit_tables(summaries, TableFormat::Markdown));
    write_text(out / "summary.tex",
               emit_tables(summaries, TableFormat::Latex));
    write_split_indices(out / "splits", prepared.splits);

    Index failed = 0;
    for (const auto& r : records)
        failed += r.status == RunStatus::Failed;

    json meta = pipeline_meta(cfg, prepared);
    meta.erase("loss");
    meta.erase("arch");
    json grid_json;
    grid_json["architectures"] = json::array();
    for (const auto& a : cfg.grid.architectures)
        grid_json["architectures"].push_back(a);
    grid_json["losses"] = json::array();
    for (const LossSpec& l : cfg.grid.losses)
        grid_json["losses"].push_back({{"kind", loss_kind_id(l.kind)},
                                       {"c", l.c},
                                       {"nu", l.nu}});
    grid_json["regimes"] = json::array();
    for (Regime r : cfg.grid.regimes)
        grid_json["regimes"].push_back(regime_id(r));
    grid_json["seeds"] = cfg.grid.seeds;
    meta["grid"] = grid_json;
    meta["records"] = records.size();
    meta["failed"] = failed;
    meta["wall_seconds"] = wall_s;
    meta["workers"] = cfg.workers;
    write_json(out / "grid_meta.json", meta);

    std::cout << "grid complete: " << records.size() << " runs (" << failed
              << " failed) in " << wall_s << " s\nresults: " << results_csv
              << '\n';
    return 0;
}

// ------------------------------------------------------------ landscape --

int cmd_landscape(const std::string& model_path,
                  const std::string& data_path, Index layer, double radius,
                  Index steps, std::uint64_t direction_seed,
                  bool frozen_state, const std::string& split_name,
                  const std::string& out_dir) {
    json meta;
    const TrainedModel model = load_model(model_path, &meta);
    const Dataset ds = load_banknote(data_path);

    std::vector<Index> rows;
    if (meta.is_object() && meta.contains("split")) {
        SplitFractions fractions;
        const json& fr = meta.at("split").at("fractions");
        fractions = {fr[0].get<double>(), fr[1].get<double>(),
                     fr[2].get<double>()};
        const Splits splits = make_splits(
            ds, fractions,
            meta.at("split").at("seed").get<std::uint64_t>(),
            one_class_mode_from_id(
                meta.at("split").at("oneclass").get<std::string>()));
        if (split_name == "train")
            rows = splits.train;
        else if (split_name == "valid")
            rows = splits.valid;
        else if (split_name == "test")
            rows = splits.test;
        else
            throw ConfigError("unknown split '" + split_name + "'");
    } else {
        for (Index i = 0; i < ds.size(); ++i)
            rows.push_back(i);
    }

    Matrix x = gather_rows(ds.features, rows);
    if (meta.is_object() && meta.value("standardize", false)) {
        Standardizer standardizer;
        standardizer.mean =
            decode_vector_hex(meta.at("standardizer").at("mean"));
        standardizer.stddev =
            decode_vector_hex(meta.at("standardizer").at("std"));
        x = standardizer.apply(x);
    }

    const LandscapeGrid grid = compute_landscape(
        model, layer, x, radius, steps, direction_seed, !frozen_state);

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    const std::string stem = "landscape_layer" + std::to_string(layer);
    export_landscape(grid, (out / (stem + ".csv")).string());
    json sidecar = landscape_sidecar(grid, model, x.rows());
    sidecar["model"] = model_path;
    sidecar["data"] = data_path;
    sidecar["split"] = split_name;
    write_json(out / (stem + ".json"), sidecar);

    std::cout << "landscape layer " << layer << " (" << steps << "x" << steps
              << ", radius " << radius << ") written to "
              << (out / (stem + ".csv")).string() << '\n';
    return 0;
}

// ------------------------------------------------------------ summarize --

int cmd_summarize(const std::string& results_path,
                  const std::string& out_dir) {
    const std::vector<ExperimentRecord> records =
        read_results_csv(results_path);
    const SummaryMap summaries = summarize(records);
    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    write_text(out / "summary.csv", emit_tables(summaries, TableFormat::Csv));
    write_text(out / "summary.md",
               emit_tables(summaries, TableFormat::Markdown));
    write_text(out / "summary.tex",
               emit_tables(summaries, TableFormat::Latex));
    json meta;
    meta["results"] = results_path;
    meta["records"] = records.size();
    write_json(out / "summary_meta.json", meta);
    std::cout << "summarized " << records.size() << " records into "
              << out_dir << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-class forward-forward anomaly detection"};
    app.require_subcommand(1);

    // shared override flags, applied on top of --config
    std::string config_path;
    std::optional<std::string> data_path, out_dir, loss_id, arch_str,
        regime_str, oneclass_str;
    std::optional<double> c_value, nu, lr;
    std::optional<Index> epochs, batch_size, patience;
    std::optional<std::uint64_t> seed, split_seed;
    std::optional<std::string> fractions_str;
    std::optional<bool> standardize_flag;

    const auto add_common = [&](CLI::App* cmd, bool with_model_axes) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--data", data_path, "dataset CSV path");
        cmd->add_option("--out", out_dir,
                        "output directory (default $OCFF_OUT_DIR or ./out)");
        cmd->add_option("--split-seed", split_seed, "split shuffle seed");
        cmd->add_option("--fractions", fractions_str,
                        "train,valid,test fractions");
        cmd->add_option("--oneclass", oneclass_str,
                        "one-class mode: off, move or discard");
        cmd->add_option("--standardize", standardize_flag,
                        "standardize features with train statistics");
        cmd->add_option("--lr", lr, "SGD learning rate");
        cmd->add_option("--epochs", epochs, "maximum epochs");
        cmd->add_option("--batch-size", batch_size,
                        "mini-batch size (0 = full batch)");
        cmd->add_option("--patience", patience, "early-stop patience");
        cmd->add_option("--nu", nu, "outlier budget");
        if (with_model_axes) {
            cmd->add_option("--loss", loss_id, "loss kind");
            cmd->add_option("--c", c_value, "loss constant C");
            cmd->add_option("--arch", arch_str, "widths, e.g. 4,25,25");
            cmd->add_option("--regime", regime_str, "ff or bp");
            cmd->add_option("--seed", seed, "model seed");
        }
    };

    CLI::App* train_cmd = app.add_subcommand("train", "train one model");
    add_common(train_cmd, true);

    CLI::App* eval_cmd =
        app.add_subcommand("eval", "score a dataset with a trained model");
    std::string eval_model, eval_data, eval_split = "test",
                            eval_out = default_out_dir();
    bool eval_batch_norm = false;
    eval_cmd->add_option("--model", eval_model, "model JSON")->required();
    eval_cmd->add_option("--data", eval_data, "dataset CSV")->required();
    eval_cmd->add_option("--split", eval_split,
                         "train, valid, test or all (default test)");
    eval_cmd->add_option("--out", eval_out, "output directory");
    eval_cmd->add_flag("--batch-norm", eval_batch_norm,
                       "ablation: normalize by the batch max instead of "
                       "the training max");

    CLI::App* grid_cmd =
        app.add_subcommand("grid", "run the evaluation grid");
    add_common(grid_cmd, false);
    std::optional<int> workers;
    bool fresh = false;
    grid_cmd->add_option("--workers", workers,
                         "worker threads (0 = hardware)");
    grid_cmd->add_flag("--fresh", fresh,
                       "discard an existing results.csv instead of resuming");

    CLI::App* landscape_cmd = app.add_subcommand(
        "landscape", "export a loss-landscape slice for one layer");
    std::string ls_model, ls_data, ls_split = "train",
                          ls_out = default_out_dir();
    Index ls_layer = 0, ls_steps = 41;
    double ls_radius = 1.0;
    std::uint64_t ls_dirseed = 0;
    bool ls_frozen = false;
    landscape_cmd->add_option("--model", ls_model, "model JSON")->required();
    landscape_cmd->add_option("--data", ls_data, "dataset CSV")->required();
    landscape_cmd->add_option("--layer", ls_layer, "layer index (0-based)");
    landscape_cmd->add_option("--radius", ls_radius, "perturbation radius");
    landscape_cmd->add_option("--steps", ls_steps, "grid steps (odd)");
    landscape_cmd->add_option("--direction-seed", ls_dirseed,
                              "direction seed");
    landscape_cmd->add_flag("--frozen-state", ls_frozen,
                            "hold the center-point loss state everywhere");
    landscape_cmd->add_option("--split", ls_split,
                              "rows to evaluate on (default train)");
    landscape_cmd->add_option("--out", ls_out, "output directory");

    CLI::App* summarize_cmd = app.add_subcommand(
        "summarize", "re-aggregate an existing results.csv");
    std::string sum_results, sum_out = default_out_dir();
    summarize_cmd->add_option("--results", sum_results, "results.csv path")
        ->required();
    summarize_cmd->add_option("--out", sum_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = load_config(config_path);
        if (data_path)
            cfg.data_path = *data_path;
        if (out_dir)
            cfg.out_dir = *out_dir;
        if (loss_id) {
            const double keep_nu = cfg.loss.nu;
            cfg.loss = default_loss_spec(loss_kind_from_id(*loss_id));
            cfg.loss.nu = keep_nu;
        }
        if (c_value)
            cfg.loss.c = *c_value;
        if (nu) {
            cfg.loss.nu = *nu;
            cfg.train.nu = *nu;
            for (LossSpec& l : cfg.grid.losses)
                l.nu = *nu;
        }
        if (arch_str)
            cfg.arch = parse_arch_flag(*arch_str);
        if (regime_str)
            cfg.train.regime = regime_from_id(*regime_str);
        if (seed)
            cfg.train.seed = *seed;
        if (lr)
            cfg.train.learning_rate = *lr;
        if (epochs)
            cfg.train.epochs_max = *epochs;
        if (batch_size)
            cfg.train.batch_size = *batch_size;
        if (patience)
            cfg.train.patience = *patience;
        if (split_seed)
            cfg.split_seed = *split_seed;
        if (fractions_str) {
            const auto parts = split(*fractions_str, ',');
            if (parts.size() != 3)
                throw ConfigError("--fractions needs 3 comma-separated "
                                  "values");
            cfg.fractions = {
                parse_double_strict(parts[0], "--fractions"),
                parse_double_strict(parts[1], "--fractions"),
                parse_double_strict(parts[2], "--fractions")};
        }
        if (oneclass_str)
            cfg.oneclass = one_class_mode_from_id(*oneclass_str);
        if (standardize_flag)
            cfg.standardize_features = *standardize_flag;
        if (workers)
            cfg.workers = *workers;
        cfg.loss.validate();
        cfg.train.validate();

        if (train_cmd->parsed())
            return cmd_train(cfg);
        if (eval_cmd->parsed())
            return cmd_eval(eval_model, eval_data, eval_split, eval_out,
                            eval_batch_norm);
        if (grid_cmd->parsed())
            return cmd_grid(cfg, fresh);
        if (landscape_cmd->parsed())
            return cmd_landscape(ls_model, ls_data, ls_layer, ls_radius,
                                 ls_steps, ls_dirseed, ls_frozen, ls_split,
                                 ls_out);
        if (summarize_cmd->parsed())
            return cmd_summarize(sum_results, sum_out);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 2;
    }
}
