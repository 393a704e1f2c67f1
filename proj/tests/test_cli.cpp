// End-to-end checks of the command-line surface: real process invocations
// against the committed fixture.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = OCFF_CLI_PATH;
const std::string kData =
    std::string(OCFF_SOURCE_DIR) + "/data/banknote_synthetic.csv";

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "ocff_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args, const fs::path& log) {
    const std::string cmd =
        kCli + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1)
        return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in);
    json doc;
    in >> doc;
    return doc;
}

} // namespace

TEST_CASE("train writes model, report, metadata and split indices") {
    const fs::path out = work_dir() / "train_basic";
    const int rc = run("train --data " + kData +
                           " --loss goodness --arch 4,8,8 --regime ff"
                           " --seed 1 --epochs 5 --out " +
                           out.string(),
                       work_dir() / "train_basic.log");
    REQUIRE(rc == 0);
    CHECK(fs::exists(out / "model.json"));
    CHECK(fs::exists(out / "report.csv"));
    CHECK(fs::exists(out / "run_meta.json"));
    CHECK(fs::exists(out / "splits/train.idx"));

    const json meta = load_json(out / "run_meta.json");
    CHECK(meta["loss"]["kind"] == "goodness");
    CHECK(meta["train"]["regime"] == "ff");
    CHECK(meta["epochs_run"].get<int>() >= 1);
    CHECK(meta["test_metrics"]["accuracy"].get<double>() >= 0.0);
}

TEST_CASE("train is reproducible") {
    const fs::path out1 = work_dir() / "repro1";
    const fs::path out2 = work_dir() / "repro2";
    const std::string flags = "train --data " + kData +
                              " --loss hb_svdd --arch 4,6 --regime bp"
                              " --seed 4 --epochs 4 --out ";
    REQUIRE(run(flags + out1.string(), work_dir() / "repro1.log") == 0);
    REQUIRE(run(flags + out2.string(), work_dir() / "repro2.log") == 0);
    CHECK(slurp(out1 / "model.json") == slurp(out2 / "model.json"));
    CHECK(slurp(out1 / "report.csv") == slurp(out2 / "report.csv"));
}

TEST_CASE("single-layer ff and bp agree through the CLI") {
    const fs::path out_ff = work_dir() / "l1_ff";
    const fs::path out_bp = work_dir() / "l1_bp";
    const std::string base = " --data " + kData +
                             " --loss goodness_adjusted --arch 4,6"
                             " --seed 2 --epochs 6 --out ";
    REQUIRE(run("train --regime ff" + base + out_ff.string(),
                work_dir() / "l1_ff.log") == 0);
    REQUIRE(run("train --regime bp" + base + out_bp.string(),
                work_dir() / "l1_bp.log") == 0);
    const json ff = load_json(out_ff / "run_meta.json");
    const json bp = load_json(out_bp / "run_meta.json");
    CHECK(ff["test_metrics"] == bp["test_metrics"]);
}

TEST_CASE("eval scores the model's own calibration split within budget") {
    const fs::path out = work_dir() / "train_basic"; // trained above
    REQUIRE(fs::exists(out / "model.json"));
    const fs::path eval_out = work_dir() / "eval_train";
    const int rc = run("eval --model " + (out / "model.json").string() +
                           " --data " + kData + " --split train --out " +
                           eval_out.string(),
                       work_dir() / "eval_train.log");
    REQUIRE(rc == 0);
    const json meta = load_json(eval_out / "eval_meta.json");
    const double flagged = meta["flagged"].get<double>();
    const double rows = meta["rows"].get<double>();
    CHECK(flagged / rows <= 0.05 + 1.0 / rows);

    // twice gives byte-identical score dumps
    const fs::path eval_out2 = work_dir() / "eval_train2";
    REQUIRE(run("eval --model " + (out / "model.json").string() +
                    " --data " + kData + " --split train --out " +
                    eval_out2.string(),
                work_dir() / "eval_train2.log") == 0);
    CHECK(slurp(eval_out / "scores.csv") == slurp(eval_out2 / "scores.csv"));
}

TEST_CASE("missing dataset fails cleanly without partial outputs") {
    const fs::path out = work_dir() / "no_data";
    const int rc = run("train --data /nonexistent.csv --out " + out.string(),
                       work_dir() / "no_data.log");
    CHECK(rc != 0);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unknown config keys are rejected") {
    const fs::path cfg = work_dir() / "bad.json";
    std::ofstream(cfg) << R"({"data": ")" << kData
                       << R"(", "typo_key": 1})";
    const int rc = run("train --config " + cfg.string(),
                       work_dir() / "bad_cfg.log");
    CHECK(rc != 0);
    CHECK(slurp(work_dir() / "bad_cfg.log").find("typo_key") !=
          std::string::npos);
}

TEST_CASE("landscape exports a csv and sidecar per layer") {
    const fs::path model = work_dir() / "train_basic" / "model.json";
    REQUIRE(fs::exists(model));
    const fs::path out = work_dir() / "landscape";
    const int rc = run("landscape --model " + model.string() + " --data " +
                           kData +
                           " --layer 0 --steps 5 --radius 0.5 --out " +
                           out.string(),
                       work_dir() / "landscape.log");
    REQUIRE(rc == 0);
    CHECK(fs::exists(out / "landscape_layer0.csv"));
    CHECK(fs::exists(out / "landscape_layer0.json"));

    // bad layer index
    CHECK(run("landscape --model " + model.string() + " --data " + kData +
                  " --layer 9 --out " + out.string(),
              work_dir() / "landscape_bad.log") != 0);
}

TEST_CASE("grid runs, summarizes and resumes without duplicates") {
    const fs::path cfg_path = work_dir() / "grid.json";
    {
        json cfg;
        cfg["data"] = kData;
        cfg["train"] = {{"epochs_max", 3}};
        cfg["grid"] = {{"losses", {"goodness"}},
                       {"architectures", {{4, 5, 5}}},
                       {"regimes", {"ff"}},
                       {"seeds", {{"from", 1}, {"to", 2}}}};
        std::ofstream(cfg_path) << cfg.dump(2);
    }
    const fs::path out = work_dir() / "grid_out";
    const std::string cmd = "grid --config " + cfg_path.string() +
                            " --workers 2 --out " + out.string();
    REQUIRE(run(cmd, work_dir() / "grid.log") == 0);
    for (const char* f :
         {"results.csv", "summary.csv", "summary.md", "summary.tex",
          "grid_meta.json"})
        CHECK(fs::exists(out / f));

    const std::string results = slurp(out / "results.csv");
    CHECK(std::count(results.begin(), results.end(), '\n') == 3);

    // rerun resumes: still exactly two records
    REQUIRE(run(cmd, work_dir() / "grid_rerun.log") == 0);
    const std::string again = slurp(out / "results.csv");
    CHECK(std::count(again.begin(), again.end(), '\n') == 3);
    CHECK(again == results); // nothing re-ran, bytes untouched

    const fs::path sum_out = work_dir() / "resummarized";
    REQUIRE(run("summarize --results " + (out / "results.csv").string() +
                    " --out " + sum_out.string(),
                work_dir() / "summarize.log") == 0);
    CHECK(slurp(sum_out / "summary.csv") == slurp(out / "summary.csv"));
}
