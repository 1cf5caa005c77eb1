#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdc/btl.hpp"
#include "crowdc/core.hpp"

namespace crowdc::sweep {

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MalformedResults : public Error {
 public:
  using Error::Error;
};

// Grids default to the simulation ranges used for the cost/accuracy study.
// Grid values are deduplicated and sorted ascending on load.
struct SweepConfig {
  std::vector<int> n{50, 100, 150, 200};
  std::vector<int> t{1, 2, 5, 8, 10};
  std::vector<double> r{0.6, 0.8};
  std::vector<int> g{2, 5};
  std::vector<int> p{4, 8, 12};
  int datasets_per_cell = 20;
  int partitions_per_dataset = 20;
  Seed master_seed = 0;
  std::string output_directory;
  btl::FitConfig fit{};

  void normalize_grids();
};

// Flat key/value text:
//
//   # comment
//   n = 50, 100, 150, 200
//   r = 0.6, 0.8
//   datasets_per_cell = 20
//   master_seed = 7
//
// Recognized keys: n t r g p datasets_per_cell partitions_per_dataset
// master_seed output_directory max_iterations convergence_tolerance
// regularization_epsilon. Unknown keys are an error.
SweepConfig parse_sweep_config(std::istream& in);
SweepConfig load_sweep_config(const std::filesystem::path& path);

// Cells that were not run, with the violated constraint.
struct SkippedCell {
  Method method;
  int n;
  int t;
  double r;
  int g;
  int p;
  ParameterViolation violation;
};

struct RowCounts {
  std::int64_t baseline_rows = 0;
  std::int64_t crowdc_rows = 0;
  std::vector<SkippedCell> skipped;
};

// Closed-form row counts for a config: per valid (n, t, r) cell,
// datasets_per_cell baseline rows, and per valid (g, p) on top of it
// datasets_per_cell * partitions_per_dataset CrowDC rows.
RowCounts expected_row_counts(const SweepConfig& config);

Seed dataset_seed(Seed master, int n, int t, double r, int dataset);
Seed partition_seed(Seed master, int n, int t, double r, int g, int p, int dataset,
                    int partition);

struct SweepOptions {
  int jobs = 1;
  // Polled between work units; when set, finished units are flushed and the
  // sweep reports itself partial.
  const std::atomic<bool>* cancel = nullptr;
};

struct SweepOutcome {
  bool complete = true;
  std::filesystem::path results_file;
  std::filesystem::path summary_file;
  std::filesystem::path manifest_file;
  std::int64_t records_written = 0;
  std::vector<SkippedCell> skipped;
};

// Runs every valid cell and writes results.csv, summary.csv and manifest.json
// into config.output_directory. Output is identical for any `jobs` value.
SweepOutcome run_sweep(const SweepConfig& config, const SweepOptions& options = {});

// Every run of one dataset: the BTL baseline first, then CrowDC per valid
// (g, p) and partition. Exposed for tests.
std::vector<ExperimentRecord> run_dataset(const SweepConfig& config, int n, int t, double r,
                                          int dataset);

// ---------------------------------------------------------------------------
// Results and summary tables.

inline constexpr std::string_view kResultsHeader =
    "method,n,t,r,g,p,dataset_seed,partition_seed,unique_pairs,total_comparisons,tau,"
    "accuracy_ratio,reduction_ratio";

void write_results_csv(std::ostream& out, std::span<const ExperimentRecord> records);
std::vector<ExperimentRecord> read_results_csv(std::istream& in);

struct CellSummary {
  Method method = Method::kBTL;
  int n = 0;
  int t = 0;
  double r = 0;
  int g = 0;
  int p = 0;
  std::int64_t runs = 0;
  double tau_mean = 0;
  double tau_std = 0;
  double accuracy_ratio_mean = 0;
  double accuracy_ratio_std = 0;
  std::int64_t accuracy_ratio_missing = 0;
  double reduction_ratio_mean = 0;
  double reduction_ratio_std = 0;
  double unique_pairs_mean = 0;
  double total_comparisons_mean = 0;
  // Closed-form totals for the cell (both equal the baseline total for BTL).
  std::int64_t naive_total = 0;
  std::int64_t shared_total = 0;
};

// Groups records by (method, n, t, r, g, p), ordered by those coordinates.
std::vector<CellSummary> summarize(std::span<const ExperimentRecord> records);

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells);

}  // namespace crowdc::sweep
