#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ocff/data.hpp"
#include "ocff/training.hpp"

namespace ocff {

/// The evaluation grid: every (loss, architecture, regime, seed) cell is an
/// independent training run against one shared data split.
struct GridSpec {
    std::vector<LossSpec> losses;
    std::vector<std::vector<Index>> architectures;
    std::vector<Regime> regimes;
    std::vector<std::uint64_t> seeds;
    /// Template for every run; regime and seed are overwritten per cell.
    TrainConfig base;

    void validate() const;
    Index total_runs() const;

    /// 5 losses x 4 architectures x {ff, bp} x seeds 1..50.
    static GridSpec paper_default();
};

enum class RunStatus { Ok, Failed };

struct ExperimentRecord {
    LossKind loss = LossKind::Goodness;
    std::vector<Index> architecture;
    Regime regime = Regime::ForwardForward;
    std::uint64_t seed = 0;
    MetricTriple metrics; // NaN when the run failed
    Index epochs_run = 0;
    std::int64_t wall_ms = 0;
    RunStatus status = RunStatus::Ok;
};

std::string arch_id(const std::vector<Index>& widths);      // "4-10-10"
std::vector<Index> arch_from_id(const std::string& id);
std::string arch_label(const std::vector<Index>& widths);   // "(4,10,10)"

/// Called after each successful run, before its record is written; invoked
/// from worker threads under a lock. For verification harnesses.
using RunObserver =
    std::function<void(const ExperimentRecord&, const TrainedModel&)>;

/// Run the grid against the splits, streaming records to `results_csv` in
/// enumeration order (so an interrupted file is always a clean prefix). If
/// the file already holds a prefix of this grid, those runs are skipped.
/// Diverged or degenerate runs become status=failed records; the grid
/// continues.
std::vector<ExperimentRecord> run_grid(const GridSpec& grid,
                                       const Dataset& ds,
                                       const Splits& splits,
                                       const std::string& results_csv,
                                       int workers,
                                       const RunObserver& observer = {});

std::vector<ExperimentRecord> read_results_csv(const std::string& path);

struct CellKey {
    Regime regime = Regime::ForwardForward;
    LossKind loss = LossKind::Goodness;
    std::vector<Index> architecture;

    bool operator<(const CellKey& other) const;
};

struct Stat {
    double mean = 0.0;
    double stddev = 0.0; // population
    double max = 0.0;
};

struct CellSummary {
    Stat accuracy;
    Stat f1;
    Stat auc;
    Index count = 0;  // records in the cell
    Index failed = 0; // excluded from the stats
};

using SummaryMap = std::map<CellKey, CellSummary>;

/// Per-cell mean / population std / max over the successful seeds. Record
/// order does not matter: cells aggregate in seed order internally.
SummaryMap summarize(const std::vector<ExperimentRecord>& records);

enum class TableFormat { Csv, Markdown, Latex };

/// Render the summary as one row per (loss, arch), grouped by regime then
/// loss. All formats print the same full-precision numbers.
std::string emit_tables(const SummaryMap& summaries, TableFormat format);

} // namespace ocff
