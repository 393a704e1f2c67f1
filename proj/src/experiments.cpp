#include "ocff/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "ocff/text.hpp"

namespace ocff {

void GridSpec::validate() const {
    if (losses.empty() || architectures.empty() || regimes.empty() ||
        seeds.empty())
        throw ConfigError("grid: every axis needs at least one entry");
    for (const LossSpec& spec : losses)
        spec.validate();
    for (const auto& arch : architectures)
        if (arch.size() < 2)
            throw ConfigError("grid: architecture needs >= 2 widths");
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j)
            if (seeds[i] == seeds[j])
                throw ConfigError("grid: seeds must be distinct");
    base.validate();
}

Index GridSpec::total_runs() const {
    return static_cast<Index>(losses.size() * architectures.size() *
                              regimes.size() * seeds.size());
}

GridSpec GridSpec::paper_default() {
    GridSpec grid;
    for (LossKind kind : kAllLossKinds)
        grid.losses.push_back(default_loss_spec(kind));
    grid.architectures = {{4, 10, 10}, {4, 25, 25}, {4, 50, 50},
                          {4, 100, 100}};
    grid.regimes = {Regime::ForwardForward, Regime::Backprop};
    for (std::uint64_t s = 1; s <= 50; ++s)
        grid.seeds.push_back(s);
    return grid;
}

std::string arch_id(const std::vector<Index>& widths) {
    std::string id;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i)
            id += '-';
        id += std::to_string(widths[i]);
    }
    return id;
}

std::vector<Index> arch_from_id(const std::string& id) {
    std::vector<Index> widths;
    for (const std::string& part : split(id, '-'))
        widths.push_back(
            static_cast<Index>(parse_int_strict(part, "architecture")));
    if (widths.size() < 2)
        throw ConfigError("architecture '" + id + "' needs >= 2 widths");
    return widths;
}

std::string arch_label(const std::vector<Index>& widths) {
    std::string label = "(";
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i)
            label += ',';
        label += std::to_string(widths[i]);
    }
    return label + ")";
}

bool CellKey::operator<(const CellKey& other) const {
    if (regime != other.regime)
        return regime == Regime::ForwardForward;
    if (loss != other.loss)
        return static_cast<int>(loss) < static_cast<int>(other.loss);
    return architecture < other.architecture;
}

namespace {

constexpr const char* kResultsHeader =
    "loss,arch,regime,seed,accuracy,f1,auc,epochs,wall_ms,status";

struct RunDef {
    LossSpec loss;
    std::vector<Index> architecture;
    Regime regime;
    std::uint64_t seed;
};

std::vector<RunDef> enumerate_runs(const GridSpec& grid) {
    std::vector<RunDef> runs;
    runs.reserve(static_cast<std::size_t>(grid.total_runs()));
    for (const LossSpec& loss : grid.losses)
        for (const auto& arch : grid.architectures)
            for (Regime regime : grid.regimes)
                for (std::uint64_t seed : grid.seeds)
                    runs.push_back({loss, arch, regime, seed});
    return runs;
}

std::string record_line(const ExperimentRecord& r) {
    std::ostringstream out;
    out << loss_kind_id(r.loss) << ',' << arch_id(r.architecture) << ','
        << regime_id(r.regime) << ',' << r.seed << ','
        << full_precision(r.metrics.accuracy) << ','
        << full_precision(r.metrics.f1) << ','
        << full_precision(r.metrics.auc) << ',' << r.epochs_run << ','
        << r.wall_ms << ',' << (r.status == RunStatus::Ok ? "ok" : "failed");
    return out.str();
}

bool same_run(const ExperimentRecord& record, const RunDef& def) {
    return record.loss == def.loss.kind &&
           record.architecture == def.architecture &&
           record.regime == def.regime && record.seed == def.seed;
}

ExperimentRecord execute_run(const RunDef& def, const Matrix& x_train,
                             const Matrix& x_valid, const Matrix& x_test,
                             const IntVector& y_test,
                             const TrainConfig& base,
                             TrainedModel* model_out) {
    ExperimentRecord record;
    record.loss = def.loss.kind;
    record.architecture = def.architecture;
    record.regime = def.regime;
    record.seed = def.seed;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    record.metrics = {nan, nan, nan};

    const auto started = std::chrono::steady_clock::now();
    try {
        TrainConfig cfg = base;
        cfg.regime = def.regime;
        cfg.seed = def.seed;
        const Network net = init_network(def.architecture, def.seed);
        auto [model, report] =
            def.regime == Regime::ForwardForward
                ? train_ff(net, x_train, x_valid, def.loss, cfg)
                : train_bp(net, x_train, x_valid, def.loss, cfg);
        const Scores scored = score_and_flag(model, x_test);
        record.metrics.accuracy = accuracy(scored.flags, y_test);
        record.metrics.f1 = f1_score(scored.flags, y_test);
        record.metrics.auc = auc(scored.probability, y_test);
        record.epochs_run = report.epochs_run;
        record.status = RunStatus::Ok;
        if (model_out)
            *model_out = std::move(model);
    } catch (const NumericError&) {
        record.status = RunStatus::Failed;
    } catch (const DataError&) {
        // degenerate calibration or single-class scores; a failed run, not
        // a broken grid
        record.status = RunStatus::Failed;
    }
    record.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return record;
}

} // namespace

std::vector<ExperimentRecord> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("read_results_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != kResultsHeader)
        throw DataError("read_results_csv: '" + path +
                        "' does not start with the results header");
    std::vector<ExperimentRecord> records;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        const std::vector<std::string> f = split(line, ',');
        const std::string where =
            "read_results_csv: line " + std::to_string(lineno);
        if (f.size() != 10)
            throw DataError(where + ": expected 10 fields");
        ExperimentRecord r;
        r.loss = loss_kind_from_id(f[0]);
        r.architecture = arch_from_id(f[1]);
        r.regime = regime_from_id(f[2]);
        r.seed = static_cast<std::uint64_t>(parse_int_strict(f[3], where));
        r.metrics.accuracy = parse_double_strict(f[4], where);
        r.metrics.f1 = parse_double_strict(f[5], where);
        r.metrics.auc = parse_double_strict(f[6], where);
        r.epochs_run = static_cast<Index>(parse_int_strict(f[7], where));
        r.wall_ms = parse_int_strict(f[8], where);
        const std::string status = trim(f[9]);
        if (status == "ok")
            r.status = RunStatus::Ok;
        else if (status == "failed")
            r.status = RunStatus::Failed;
        else
            throw DataError(where + ": unknown status '" + status + "'");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<ExperimentRecord> run_grid(const GridSpec& grid,
                                       const Dataset& ds,
                                       const Splits& splits,
                                       const std::string& results_csv,
                                       int workers,
                                       const RunObserver& observer) {
    grid.validate();
    const std::vector<RunDef> runs = enumerate_runs(grid);

    // Shared, read-only inputs for every run.
    const Matrix x_train = standardize(splits, gather_rows(ds.features,
                                                           splits.train));
    const Matrix x_valid = standardize(splits, gather_rows(ds.features,
                                                           splits.valid));
    const Matrix x_test = standardize(splits, gather_rows(ds.features,
                                                          splits.test));
    const IntVector y_test = gather_labels(ds.labels, splits.test);

    // Resume: an existing file must be a clean prefix of this enumeration.
    std::vector<ExperimentRecord> records;
    if (std::filesystem::exists(results_csv) &&
        std::filesystem::file_size(results_csv) > 0) {
        records = read_results_csv(results_csv);
        if (records.size() > runs.size())
            throw ConfigError("run_grid: '" + results_csv +
                              "' holds more records than this grid defines");
        for (std::size_t i = 0; i < records.size(); ++i)
            if (!same_run(records[i], runs[i]))
                throw ConfigError(
                    "run_grid: '" + results_csv +
                    "' does not match this grid's run order at record " +
                    std::to_string(i) + "; use a fresh output file");
    }
    const std::size_t first_pending = records.size();

    std::ofstream out;
    if (first_pending == 0) {
        out.open(results_csv, std::ios::trunc);
        if (!out)
            throw DataError("run_grid: cannot open '" + results_csv + "'");
        out << kResultsHeader << '\n';
        out.flush();
    } else if (first_pending < runs.size()) {
        out.open(results_csv, std::ios::app);
        if (!out)
            throw DataError("run_grid: cannot reopen '" + results_csv + "'");
    }
    records.resize(runs.size());

    if (first_pending < runs.size()) {
        std::mutex sink_mutex;
        std::map<std::size_t, ExperimentRecord> completed;
        std::size_t next_to_write = first_pending;
        std::atomic<std::size_t> next_run{first_pending};
        std::exception_ptr failure;

        const auto worker = [&]() {
            while (true) {
                const std::size_t k = next_run.fetch_add(1);
                if (k >= runs.size())
                    return;
                {
                    std::lock_guard<std::mutex> lock(sink_mutex);
                    if (failure)
                        return;
                }
                try {
                    TrainedModel model;
                    ExperimentRecord record = execute_run(
                        runs[k], x_train, x_valid, x_test, y_test, grid.base,
                        observer ? &model : nullptr);
                    std::lock_guard<std::mutex> lock(sink_mutex);
                    if (observer && record.status == RunStatus::Ok)
                        observer(record, model);
                    completed.emplace(k, std::move(record));
                    // Flush the contiguous prefix so an interrupted file
                    // never has holes.
                    while (!completed.empty() &&
                           completed.begin()->first == next_to_write) {
                        records[next_to_write] =
                            std::move(completed.begin()->second);
                        out << record_line(records[next_to_write]) << '\n';
                        out.flush();
                        if (!out)
                            throw DataError("run_grid: write to results "
                                            "file failed");
                        completed.erase(completed.begin());
                        ++next_to_write;
                    }
                } catch (...) {
                    std::lock_guard<std::mutex> lock(sink_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    return;
                }
            }
        };

        const int n_threads = std::max(
            1, workers > 0 ? workers
                           : static_cast<int>(
                                 std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
        if (failure)
            std::rethrow_exception(failure);
    }
    return records;
}

namespace {

Stat reduce_stat(const std::vector<double>& values) {
    Stat stat;
    if (values.empty())
        return stat;
    double sum = 0.0, max = values.front();
    for (double v : values) {
        sum += v;
        max = std::max(max, v);
    }
    const double mean = sum / double(values.size());
    double sq = 0.0;
    for (double v : values)
        sq += (v - mean) * (v - mean);
    stat.mean = mean;
    stat.stddev = std::sqrt(sq / double(values.size()));
    stat.max = max;
    return stat;
}

} // namespace

SummaryMap summarize(const std::vector<ExperimentRecord>& records) {
    struct CellRuns {
        std::vector<const ExperimentRecord*> ok;
        Index count = 0;
        Index failed = 0;
    };
    std::map<CellKey, CellRuns> cells;
    for (const ExperimentRecord& r : records) {
        CellRuns& cell = cells[{r.regime, r.loss, r.architecture}];
        ++cell.count;
        if (r.status == RunStatus::Ok)
            cell.ok.push_back(&r);
        else
            ++cell.failed;
    }

    SummaryMap summaries;
    for (auto& [key, cell] : cells) {
        // Aggregate in seed order so the result ignores record order.
        std::sort(cell.ok.begin(), cell.ok.end(),
                  [](const ExperimentRecord* a, const ExperimentRecord* b) {
                      return a->seed < b->seed;
                  });
        CellSummary summary;
        summary.count = cell.count;
        summary.failed = cell.failed;
        std::vector<double> acc, f1, auc_values;
        for (const ExperimentRecord* r : cell.ok) {
            acc.push_back(r->metrics.accuracy);
            f1.push_back(r->metrics.f1);
            auc_values.push_back(r->metrics.auc);
        }
        summary.accuracy = reduce_stat(acc);
        summary.f1 = reduce_stat(f1);
        summary.auc = reduce_stat(auc_values);
        summaries.emplace(key, std::move(summary));
    }
    return summaries;
}

std::string emit_tables(const SummaryMap& summaries, TableFormat format) {
    std::ostringstream out;
    if (format == TableFormat::Csv) {
        out << "regime,loss,arch,runs,failed,acc_mean,acc_std,acc_max,"
               "f1_mean,f1_std,f1_max,auc_mean,auc_std,auc_max\n";
        for (const auto& [key, s] : summaries)
            out << regime_id(key.regime) << ',' << loss_kind_id(key.loss)
                << ',' << arch_id(key.architecture) << ',' << s.count << ','
                << s.failed << ',' << full_precision(s.accuracy.mean) << ','
                << full_precision(s.accuracy.stddev) << ','
                << full_precision(s.accuracy.max) << ','
                << full_precision(s.f1.mean) << ','
                << full_precision(s.f1.stddev) << ','
                << full_precision(s.f1.max) << ','
                << full_precision(s.auc.mean) << ','
                << full_precision(s.auc.stddev) << ','
                << full_precision(s.auc.max) << '\n';
        return out.str();
    }

    const auto regime_title = [](Regime r) {
        return r == Regime::ForwardForward ? "Forward-forward"
                                           : "Backpropagation";
    };
    for (Regime regime : {Regime::ForwardForward, Regime::Backprop}) {
        bool any = false;
        for (const auto& [key, s] : summaries)
            any |= key.regime == regime;
        if (!any)
            continue;
        if (format == TableFormat::Markdown) {
            out << "## " << regime_title(regime) << " (" << regime_id(regime)
                << ")\n\n"
                << "| Method | Accuracy mean | Accuracy std | Accuracy max "
                   "| F1 mean | F1 std | F1 max | AUC mean | AUC std | AUC "
                   "max | Runs | Failed |\n"
                << "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
            for (const auto& [key, s] : summaries) {
                if (key.regime != regime)
                    continue;
                out << "| " << loss_kind_label(key.loss) << ' '
                    << arch_label(key.architecture) << " | "
                    << full_precision(s.accuracy.mean) << " | "
                    << full_precision(s.accuracy.stddev) << " | "
                    << full_precision(s.accuracy.max) << " | "
                    << full_precision(s.f1.mean) << " | "
                    << full_precision(s.f1.stddev) << " | "
                    << full_precision(s.f1.max) << " | "
                    << full_precision(s.auc.mean) << " | "
                    << full_precision(s.auc.stddev) << " | "
                    << full_precision(s.auc.max) << " | " << s.count << " | "
                    << s.failed << " |\n";
            }
            out << '\n';
        } else {
            out << "% " << regime_title(regime) << '\n'
                << "\\begin{tabular}{|c|ccc|ccc|ccc|}\n\\hline\n"
                << "Method & acc $\\mu$ & acc $\\sigma$ & acc max & F1 "
                   "$\\mu$ & F1 $\\sigma$ & F1 max & AUC $\\mu$ & AUC "
                   "$\\sigma$ & AUC max \\\\ \\hline\n";
            for (const auto& [key, s] : summaries) {
                if (key.regime != regime)
                    continue;
                out << loss_kind_label(key.loss) << ' '
                    << arch_label(key.architecture) << " & "
                    << full_precision(s.accuracy.mean) << " & "
                    << full_precision(s.accuracy.stddev) << " & "
                    << full_precision(s.accuracy.max) << " & "
                    << full_precision(s.f1.mean) << " & "
                    << full_precision(s.f1.stddev) << " & "
                    << full_precision(s.f1.max) << " & "
                    << full_precision(s.auc.mean) << " & "
                    << full_precision(s.auc.stddev) << " & "
                    << full_precision(s.auc.max) << " \\\\\n";
            }
            out << "\\hline\n\\end{tabular}\n";
        }
    }
    return out.str();
}

} // namespace ocff
