#include "crowdc/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "crowdc/divide_conquer.hpp"
#include "crowdc/metrics.hpp"
#include "crowdc/rng.hpp"
#include "crowdc/simulate.hpp"

namespace crowdc::sweep {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is missing on older libstdc++ releases.
    std::string copy(text);
    std::size_t used = 0;
    try {
      value = std::stod(copy, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (copy.empty() || used != copy.size()) {
      throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
    }
  } else {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
      throw ConfigError(fmt::format("{}: '{}' is not an integer", what, text));
    }
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view key) {
  std::vector<T> out;
  for (auto field : split(text, ',')) out.push_back(parse_number<T>(field, key));
  return out;
}

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

void SweepConfig::normalize_grids() {
  sort_unique(n);
  sort_unique(t);
  sort_unique(r);
  sort_unique(g);
  sort_unique(p);
}

SweepConfig parse_sweep_config(std::istream& in) {
  SweepConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string_view value = trim(view.substr(eq + 1));
    if (value.empty()) throw ConfigError(fmt::format("line {}: '{}' has no value", line_no, key));

    if (key == "n") {
      config.n = parse_list<int>(value, key);
    } else if (key == "t") {
      config.t = parse_list<int>(value, key);
    } else if (key == "r") {
      config.r = parse_list<double>(value, key);
    } else if (key == "g") {
      config.g = parse_list<int>(value, key);
    } else if (key == "p") {
      config.p = parse_list<int>(value, key);
    } else if (key == "datasets_per_cell") {
      config.datasets_per_cell = parse_number<int>(value, key);
    } else if (key == "partitions_per_dataset") {
      config.partitions_per_dataset = parse_number<int>(value, key);
    } else if (key == "master_seed") {
      config.master_seed = parse_number<Seed>(value, key);
    } else if (key == "output_directory") {
      config.output_directory = std::string(value);
    } else if (key == "max_iterations") {
      config.fit.max_iterations = parse_number<int>(value, key);
    } else if (key == "convergence_tolerance") {
      config.fit.convergence_tolerance = parse_number<double>(value, key);
    } else if (key == "regularization_epsilon") {
      config.fit.regularization_epsilon = parse_number<double>(value, key);
    } else {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
  }
  if (config.datasets_per_cell < 1 || config.partitions_per_dataset < 1) {
    throw ConfigError("datasets_per_cell and partitions_per_dataset must be >= 1");
  }
  try {
    config.fit.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  config.normalize_grids();
  return config;
}

SweepConfig load_sweep_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  return parse_sweep_config(in);
}

RowCounts expected_row_counts(const SweepConfig& config) {
  RowCounts counts;
  const std::int64_t datasets = config.datasets_per_cell;
  for (int n : config.n) {
    for (int t : config.t) {
      for (double r : config.r) {
        if (auto v = find_baseline_violation(n, t, r)) {
          counts.skipped.push_back({Method::kBTL, n, t, r, 0, 0, *v});
          continue;
        }
        counts.baseline_rows += datasets;
        for (int g : config.g) {
          for (int p : config.p) {
            if (auto v = find_violation(Parameters{n, t, r, g, p})) {
              counts.skipped.push_back({Method::kCrowDC, n, t, r, g, p, *v});
              continue;
            }
            counts.crowdc_rows += datasets * config.partitions_per_dataset;
          }
        }
      }
    }
  }
  return counts;
}

namespace {
constexpr std::uint64_t kDatasetTag = 0x64617461;    // "data"
constexpr std::uint64_t kPartitionTag = 0x70617274;  // "part"
}  // namespace

Seed dataset_seed(Seed master, int n, int t, double r, int dataset) {
  return derive_seed(master, {kDatasetTag, static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(t), double_bits(r),
                              static_cast<std::uint64_t>(dataset)});
}

Seed partition_seed(Seed master, int n, int t, double r, int g, int p, int dataset,
                    int partition) {
  return derive_seed(master, {kPartitionTag, static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(t), double_bits(r),
                              static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(p),
                              static_cast<std::uint64_t>(dataset),
                              static_cast<std::uint64_t>(partition)});
}

std::vector<ExperimentRecord> run_dataset(const SweepConfig& config, int n, int t, double r,
                                          int dataset) {
  const Seed data_seed = dataset_seed(config.master_seed, n, t, r, dataset);
  const sim::WorkerModel model{r, t, data_seed};
  const auto truth = sim::make_dataset(n);
  const std::int64_t baseline_total = choose2(n) * t;

  std::vector<ExperimentRecord> records;
  const auto baseline = sim::run_btl_baseline(n, model, config.fit);
  const double baseline_tau = metrics::kendall_tau(baseline.final_scores, truth).tau;
  auto ratio_of = [&](double tau) -> std::optional<double> {
    if (!(baseline_tau > 0)) return std::nullopt;
    return metrics::accuracy_ratio(tau, baseline_tau);
  };
  records.push_back(make_record(Method::kBTL, Parameters{n, t, r, 0, 0}, data_seed, 0,
                                baseline.unique_pairs_compared, baseline_tau,
                                ratio_of(baseline_tau), baseline_total));

  for (int g : config.g) {
    for (int p : config.p) {
      const Parameters params{n, t, r, g, p};
      if (find_violation(params)) continue;
      for (int k = 0; k < config.partitions_per_dataset; ++k) {
        const Seed part_seed = partition_seed(config.master_seed, n, t, r, g, p, dataset, k);
        const auto result =
            sim::run_crowdc_simulated(n, model, dc::CrowdcConfig{g, p, part_seed, config.fit});
        const double tau = metrics::kendall_tau(result.final_scores, truth).tau;
        records.push_back(make_record(Method::kCrowDC, params, data_seed, part_seed,
                                      result.unique_pairs_compared, tau, ratio_of(tau),
                                      baseline_total));
      }
    }
  }
  return records;
}

namespace {

struct WorkUnit {
  int n;
  int t;
  double r;
  int dataset;
};

std::vector<WorkUnit> work_units(const SweepConfig& config) {
  std::vector<WorkUnit> units;
  for (int n : config.n) {
    for (int t : config.t) {
      for (double r : config.r) {
        if (find_baseline_violation(n, t, r)) continue;
        for (int d = 0; d < config.datasets_per_cell; ++d) units.push_back({n, t, r, d});
      }
    }
  }
  return units;
}

nlohmann::json config_json(const SweepConfig& config) {
  return {{"n", config.n},
          {"t", config.t},
          {"r", config.r},
          {"g", config.g},
          {"p", config.p},
          {"datasets_per_cell", config.datasets_per_cell},
          {"partitions_per_dataset", config.partitions_per_dataset},
          {"master_seed", config.master_seed},
          {"max_iterations", config.fit.max_iterations},
          {"convergence_tolerance", config.fit.convergence_tolerance},
          {"regularization_epsilon", config.fit.regularization_epsilon}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

SweepOutcome run_sweep(const SweepConfig& input, const SweepOptions& options) {
  SweepConfig config = input;
  config.normalize_grids();
  if (config.output_directory.empty()) throw ConfigError("no output directory given");
  const fs::path out_dir(config.output_directory);
  fs::create_directories(out_dir);

  const auto units = work_units(config);
  const RowCounts expected = expected_row_counts(config);

  // One slot per unit keeps the output order independent of scheduling.
  std::vector<std::optional<std::vector<ExperimentRecord>>> slots(units.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    while (true) {
      if (options.cancel && options.cancel->load()) return;
      const std::size_t index = next.fetch_add(1);
      if (index >= units.size()) return;
      const auto& unit = units[index];
      try {
        slots[index] = run_dataset(config, unit.n, unit.t, unit.r, unit.dataset);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<ExperimentRecord> records;
  records.reserve(static_cast<std::size_t>(expected.baseline_rows + expected.crowdc_rows));
  std::size_t units_done = 0;
  for (auto& slot : slots) {
    if (!slot) continue;
    ++units_done;
    records.insert(records.end(), slot->begin(), slot->end());
  }
  const bool complete = units_done == units.size();

  SweepOutcome outcome;
  outcome.complete = complete;
  outcome.results_file = out_dir / "results.csv";
  outcome.summary_file = out_dir / "summary.csv";
  outcome.manifest_file = out_dir / "manifest.json";
  outcome.records_written = static_cast<std::int64_t>(records.size());
  outcome.skipped = expected.skipped;

  std::ostringstream results;
  write_results_csv(results, records);
  write_text(outcome.results_file, results.str());

  std::ostringstream summary;
  write_summary_csv(summary, summarize(records));
  write_text(outcome.summary_file, summary.str());

  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& cell : expected.skipped) {
    skipped.push_back({{"method", to_string(cell.method)},
                       {"n", cell.n},
                       {"t", cell.t},
                       {"r", cell.r},
                       {"g", cell.g},
                       {"p", cell.p},
                       {"violation", to_string(cell.violation)}});
  }
  nlohmann::json manifest = {
      {"status", complete ? "complete" : "partial"},
      {"config", config_json(config)},
      {"work_units_total", units.size()},
      {"work_units_done", units_done},
      {"expected_rows", {{"btl", expected.baseline_rows}, {"crowdc", expected.crowdc_rows}}},
      {"rows_written", records.size()},
      {"skipped_cells", skipped},
  };
  write_text(outcome.manifest_file, manifest.dump(2) + "\n");
  return outcome;
}

// ---------------------------------------------------------------------------

void write_results_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
  out << kResultsHeader << '\n';
  for (const auto& rec : records) {
    const bool btl = rec.method == Method::kBTL;
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(rec.method), rec.n,
                       rec.t, rec.r, btl ? "" : std::to_string(rec.g),
                       btl ? "" : std::to_string(rec.p), rec.dataset_seed,
                       btl ? "" : std::to_string(rec.partition_seed), rec.unique_pairs,
                       rec.total_comparisons, rec.kendall_tau,
                       rec.accuracy_ratio ? fmt::format("{}", *rec.accuracy_ratio) : "",
                       rec.reduction_ratio);
  }
}

std::vector<ExperimentRecord> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultsHeader) {
    throw MalformedResults("missing or unexpected results header");
  }
  std::vector<ExperimentRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 13) {
      throw MalformedResults(fmt::format("line {}: expected 13 fields, got {}", line_no, f.size()));
    }
    try {
      ExperimentRecord rec;
      rec.method = method_from_string(f[0]);
      rec.n = parse_number<int>(f[1], "n");
      rec.t = parse_number<int>(f[2], "t");
      rec.r = parse_number<double>(f[3], "r");
      const bool btl = rec.method == Method::kBTL;
      rec.g = btl ? 0 : parse_number<int>(f[4], "g");
      rec.p = btl ? 0 : parse_number<int>(f[5], "p");
      rec.dataset_seed = parse_number<Seed>(f[6], "dataset_seed");
      rec.partition_seed = btl ? 0 : parse_number<Seed>(f[7], "partition_seed");
      rec.unique_pairs = parse_number<std::int64_t>(f[8], "unique_pairs");
      rec.total_comparisons = parse_number<std::int64_t>(f[9], "total_comparisons");
      rec.kendall_tau = parse_number<double>(f[10], "tau");
      if (!trim(f[11]).empty()) rec.accuracy_ratio = parse_number<double>(f[11], "accuracy_ratio");
      rec.reduction_ratio = parse_number<double>(f[12], "reduction_ratio");
      if (rec.total_comparisons != rec.unique_pairs * rec.t) {
        throw MalformedResults("total_comparisons != unique_pairs * t");
      }
      records.push_back(rec);
    } catch (const Error& e) {
      throw MalformedResults(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return records;
}

namespace {

struct Moments {
  std::int64_t count = 0;
  double mean_ = 0;
  double m2 = 0;

  // Welford update; identical inputs give exactly zero spread.
  void add(double x) {
    ++count;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count);
    m2 += delta * (x - mean_);
  }
  double mean() const { return mean_; }
  // Sample standard deviation; 0 for fewer than two values.
  double stddev() const {
    if (count < 2 || !(m2 > 0)) return 0.0;
    return std::sqrt(m2 / static_cast<double>(count - 1));
  }
};

}  // namespace

std::vector<CellSummary> summarize(std::span<const ExperimentRecord> records) {
  using Key = std::tuple<int, int, int, double, int, int>;
  struct Acc {
    Moments tau, ratio, reduction, pairs, total;
    std::int64_t missing = 0;
  };
  std::map<Key, Acc> cells;
  for (const auto& rec : records) {
    auto& acc = cells[Key{static_cast<int>(rec.method), rec.n, rec.t, rec.r, rec.g, rec.p}];
    acc.tau.add(rec.kendall_tau);
    if (rec.accuracy_ratio) {
      acc.ratio.add(*rec.accuracy_ratio);
    } else {
      ++acc.missing;
    }
    acc.reduction.add(rec.reduction_ratio);
    acc.pairs.add(static_cast<double>(rec.unique_pairs));
    acc.total.add(static_cast<double>(rec.total_comparisons));
  }

  std::vector<CellSummary> out;
  out.reserve(cells.size());
  for (const auto& [key, acc] : cells) {
    CellSummary cell;
    const auto& [method, n, t, r, g, p] = key;
    cell.method = static_cast<Method>(method);
    cell.n = n;
    cell.t = t;
    cell.r = r;
    cell.g = g;
    cell.p = p;
    cell.runs = acc.tau.count;
    cell.tau_mean = acc.tau.mean();
    cell.tau_std = acc.tau.stddev();
    cell.accuracy_ratio_mean = acc.ratio.mean();
    cell.accuracy_ratio_std = acc.ratio.stddev();
    cell.accuracy_ratio_missing = acc.missing;
    cell.reduction_ratio_mean = acc.reduction.mean();
    cell.reduction_ratio_std = acc.reduction.stddev();
    cell.unique_pairs_mean = acc.pairs.mean();
    cell.total_comparisons_mean = acc.total.mean();
    if (cell.method == Method::kBTL) {
      cell.naive_total = cell.shared_total = choose2(n) * t;
    } else {
      const auto cost = sim::cost_formulas(n, g, p, t);
      cell.naive_total = cost.crowdc_total_naive;
      cell.shared_total = cost.crowdc_total_shared;
    }
    out.push_back(cell);
  }
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells) {
  out << "method,n,t,r,g,p,runs,tau_mean,tau_std,accuracy_ratio_mean,accuracy_ratio_std,"
         "accuracy_ratio_missing,reduction_ratio_mean,reduction_ratio_std,unique_pairs_mean,"
         "total_comparisons_mean,naive_total,shared_total\n";
  for (const auto& c : cells) {
    const bool btl = c.method == Method::kBTL;
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                       to_string(c.method), c.n, c.t, c.r, btl ? "" : std::to_string(c.g),
                       btl ? "" : std::to_string(c.p), c.runs, c.tau_mean, c.tau_std,
                       c.accuracy_ratio_mean, c.accuracy_ratio_std, c.accuracy_ratio_missing,
                       c.reduction_ratio_mean, c.reduction_ratio_std, c.unique_pairs_mean,
                       c.total_comparisons_mean, c.naive_total, c.shared_total);
  }
}

}  // namespace crowdc::sweep
