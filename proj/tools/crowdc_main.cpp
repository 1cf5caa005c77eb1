// crowdc: run simulation sweeps, plot their results, and rank comparison files.
//
//   crowdc sweep --config <file> --out <dir> [--seed <u64>] [--jobs <k>]
//   crowdc plot --results <file> --out <dir>
//   crowdc rank --comparisons <csv> --method {btl|crowdc} [--g <int>] [--p <int>] [--seed <u64>]
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 partial sweep.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "crowdc/btl.hpp"
#include "crowdc/divide_conquer.hpp"
#include "crowdc/plot.hpp"
#include "crowdc/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted.store(true); }

int run_sweep_command(const std::string& config_path, const std::string& out_dir,
                      std::optional<crowdc::Seed> seed, int jobs) {
  auto config = crowdc::sweep::load_sweep_config(config_path);
  config.output_directory = out_dir;
  if (seed) config.master_seed = *seed;

  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  const auto outcome = crowdc::sweep::run_sweep(config, {jobs, &g_interrupted});

  for (const auto& cell : outcome.skipped) {
    std::cerr << fmt::format("skipped {} n={} t={} r={} g={} p={}: {}\n",
                             crowdc::to_string(cell.method), cell.n, cell.t, cell.r, cell.g,
                             cell.p, crowdc::to_string(cell.violation));
  }
  std::cerr << fmt::format("{} records -> {}\n", outcome.records_written,
                           outcome.results_file.string());
  if (!outcome.complete) {
    std::cerr << "sweep interrupted; partial results flushed (see manifest.json)\n";
    return kExitPartial;
  }
  return kExitOk;
}

int run_plot_command(const std::string& results, const std::string& out_dir) {
  const auto files = crowdc::plot::emit_plots(results, out_dir);
  for (const auto& f : files) std::cout << f.string() << '\n';
  return kExitOk;
}

int run_rank_command(const std::string& path, const std::string& method, int g, int p,
                     crowdc::Seed seed) {
  std::ifstream in(path);
  if (!in) throw crowdc::Error(fmt::format("cannot open '{}'", path));
  const auto comparisons = crowdc::read_comparisons_csv(in);
  if (comparisons.empty()) throw crowdc::Error("comparison file has no rows");

  std::set<crowdc::ItemIndex> item_set;
  std::map<crowdc::ItemPair, std::vector<crowdc::Comparison>> by_pair;
  for (const auto& c : comparisons) {
    item_set.insert(c.a());
    item_set.insert(c.b());
    by_pair[crowdc::ItemPair::of(c.a(), c.b())].push_back(c);
  }
  const std::vector<crowdc::ItemIndex> items(item_set.begin(), item_set.end());

  std::optional<crowdc::ScoreVector> scores;
  if (method == "btl") {
    scores = crowdc::btl::fit_normalized(comparisons, items, {}, crowdc::ScoreFlavor::kFinal);
  } else {
    // Requested pairs are answered from the file; pairs it lacks stay
    // uncompared.
    auto provider = [&](std::span<const crowdc::ItemPair> pairs) {
      std::vector<crowdc::Comparison> out;
      for (const auto& pair : pairs) {
        if (auto it = by_pair.find(pair); it != by_pair.end()) {
          out.insert(out.end(), it->second.begin(), it->second.end());
        }
      }
      return out;
    };
    const auto result = crowdc::dc::run_crowdc(items, provider, {g, p, seed, {}});
    std::cerr << fmt::format("pairs used: {} of {}\n", result.unique_pairs_compared,
                             crowdc::choose2(static_cast<std::int64_t>(items.size())));
    scores = result.final_scores;
  }

  auto order = scores->ascending_order();
  std::cout << "rank,item,score\n";
  int rank = 1;
  for (auto it = order.rbegin(); it != order.rend(); ++it, ++rank) {
    std::cout << fmt::format("{},{},{}\n", rank, *it, scores->at(*it));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divide-and-conquer paired-comparison ranking and simulation"};
  app.require_subcommand(1);

  std::string config_path, out_dir, results_path, comparisons_path, method;
  std::optional<crowdc::Seed> sweep_seed;
  crowdc::Seed rank_seed = 0;
  int jobs = 1, g = 2, p = 2;

  auto* sweep = app.add_subcommand("sweep", "Run a simulation sweep");
  sweep->add_option("--config", config_path, "Sweep configuration file")->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--seed", sweep_seed, "Master seed (overrides the config)");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand("plot", "Render plots from a results table");
  plot->add_option("--results", results_path, "results.csv from a sweep")->required();
  plot->add_option("--out", out_dir, "Output directory")->required();

  auto* rank = app.add_subcommand("rank", "Rank items from a comparison CSV");
  rank->add_option("--comparisons", comparisons_path, "subject_id,a,b,chosen CSV")->required();
  rank->add_option("--method", method, "btl or crowdc")->required()
      ->check(CLI::IsMember({"btl", "crowdc"}));
  rank->add_option("--g", g, "Group count (crowdc)");
  rank->add_option("--p", p, "Pivots per group (crowdc)");
  rank->add_option("--seed", rank_seed, "Partition seed (crowdc)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sweep) return run_sweep_command(config_path, out_dir, sweep_seed, jobs);
    if (*plot) return run_plot_command(results_path, out_dir);
    if (*rank) return run_rank_command(comparisons_path, method, g, p, rank_seed);
  } catch (const crowdc::sweep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const crowdc::ParameterError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
