#include <map>
#include <tuple>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "crowdc/btl.hpp"
#include "crowdc/divide_conquer.hpp"
#include "crowdc/metrics.hpp"
#include "crowdc/plot.hpp"
#include "crowdc/simulate.hpp"
#include "crowdc/sweep.hpp"

namespace py = pybind11;
using namespace crowdc;

namespace {

using ComparisonTuple = std::tuple<std::string, ItemIndex, ItemIndex, ItemIndex>;

std::vector<Comparison> to_comparisons(const std::vector<ComparisonTuple>& rows) {
  std::vector<Comparison> out;
  out.reserve(rows.size());
  for (const auto& [subject, a, b, chosen] : rows) out.emplace_back(subject, a, b, chosen);
  return out;
}

std::map<ItemIndex, double> to_dict(const ScoreVector& scores) {
  std::map<ItemIndex, double> out;
  for (const auto& [item, value] : scores.entries()) out.emplace(item, value);
  return out;
}

ScoreVector from_dict(const std::map<ItemIndex, double>& scores) {
  return ScoreVector(ScoreFlavor::kFinal, {scores.begin(), scores.end()});
}

btl::FitConfig fit_config(int max_iterations, double tolerance, double epsilon) {
  btl::FitConfig config{max_iterations, tolerance, epsilon};
  config.validate();
  return config;
}

py::dict crowdc_result_dict(const dc::CrowdcResult& r) {
  py::dict d;
  d["groups"] = r.partition.groups;
  d["pivots"] = r.partition.pivots;
  d["final_scores"] = to_dict(r.final_scores);
  d["out_scores"] = to_dict(r.out_scores);
  std::vector<std::map<ItemIndex, double>> within;
  for (const auto& s : r.within_scores) within.push_back(to_dict(s));
  d["within_scores"] = within;
  d["unique_pairs"] = r.unique_pairs_compared;
  return d;
}

}  // namespace

PYBIND11_MODULE(_crowdc, m) {
  m.doc() = "Bradley-Terry ranking, divide-and-conquer ranking and simulation";

  py::register_exception<Error>(m, "CrowdcError", PyExc_ValueError);

  m.def(
      "fit_btl",
      [](const std::vector<ComparisonTuple>& comparisons, const std::vector<ItemIndex>& items,
         bool normalized, int max_iterations, double tolerance, double epsilon) {
        const auto cmp = to_comparisons(comparisons);
        const auto config = fit_config(max_iterations, tolerance, epsilon);
        if (normalized) {
          return to_dict(btl::fit_normalized(cmp, items, config, ScoreFlavor::kNormalized));
        }
        return to_dict(btl::fit(btl::build_win_matrix(cmp, items), config));
      },
      py::arg("comparisons"), py::arg("items"), py::arg("normalized") = true,
      py::arg("max_iterations") = 10'000, py::arg("tolerance") = 1e-8,
      py::arg("epsilon") = 0.01,
      "Fit Bradley-Terry strengths to (subject_id, a, b, chosen) tuples.");

  m.def(
      "rank_crowdc",
      [](const std::vector<ComparisonTuple>& comparisons, const std::vector<ItemIndex>& items,
         int g, int p, Seed seed) {
        std::map<ItemPair, std::vector<Comparison>> by_pair;
        for (auto& c : to_comparisons(comparisons)) {
          by_pair[ItemPair::of(c.a(), c.b())].push_back(std::move(c));
        }
        auto provider = [&](std::span<const ItemPair> pairs) {
          std::vector<Comparison> out;
          for (const auto& pair : pairs) {
            if (auto it = by_pair.find(pair); it != by_pair.end()) {
              out.insert(out.end(), it->second.begin(), it->second.end());
            }
          }
          return out;
        };
        return crowdc_result_dict(dc::run_crowdc(items, provider, {g, p, seed, {}}));
      },
      py::arg("comparisons"), py::arg("items"), py::arg("g"), py::arg("p"), py::arg("seed") = 0,
      "Divide-and-conquer ranking answered from a fixed comparison set.");

  m.def(
      "simulate_crowdc",
      [](int n, double r, int t, Seed seed, int g, int p, Seed partition_seed) {
        return crowdc_result_dict(sim::run_crowdc_simulated(n, {r, t, seed}, {g, p, partition_seed, {}}));
      },
      py::arg("n"), py::arg("r"), py::arg("t"), py::arg("seed"), py::arg("g"), py::arg("p"),
      py::arg("partition_seed") = 0);

  m.def(
      "simulate_btl",
      [](int n, double r, int t, Seed seed) {
        const auto result = sim::run_btl_baseline(n, {r, t, seed});
        py::dict d;
        d["final_scores"] = to_dict(result.final_scores);
        d["unique_pairs"] = result.unique_pairs_compared;
        return d;
      },
      py::arg("n"), py::arg("r"), py::arg("t"), py::arg("seed"));

  m.def(
      "generate_comparisons",
      [](int n, double r, int t, Seed seed) {
        std::vector<ComparisonTuple> out;
        for (const auto& c : sim::generate_comparisons(all_pairs(sim::make_dataset(n)), {r, t, seed})) {
          out.emplace_back(c.subject_id(), c.a(), c.b(), c.chosen());
        }
        return out;
      },
      py::arg("n"), py::arg("r"), py::arg("t"), py::arg("seed"),
      "Simulated verdicts for every pair of items 1..n.");

  m.def(
      "kendall_tau",
      [](const std::map<ItemIndex, double>& scores, const std::vector<ItemIndex>& truth) {
        return metrics::kendall_tau(from_dict(scores), truth).tau;
      },
      py::arg("scores"), py::arg("truth"),
      "Kendall tau-a against a ground-truth order listed worst to best.");

  m.def("pivot_orders", [](int group_size, int p) { return dc::pivot_orders(group_size, p).orders; },
        py::arg("group_size"), py::arg("p"));

  m.def(
      "cost_formulas",
      [](int n, int g, int p, int t) {
        const auto c = sim::cost_formulas(n, g, p, t);
        py::dict d;
        d["baseline_total"] = c.baseline_total;
        d["crowdc_total_naive"] = c.crowdc_total_naive;
        d["crowdc_total_shared"] = c.crowdc_total_shared;
        return d;
      },
      py::arg("n"), py::arg("g"), py::arg("p"), py::arg("t"));

  m.def(
      "run_sweep",
      [](const std::filesystem::path& config_path, const std::filesystem::path& out,
         std::optional<Seed> seed, int jobs) {
        auto config = sweep::load_sweep_config(config_path);
        config.output_directory = out.string();
        if (seed) config.master_seed = *seed;
        sweep::SweepOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = sweep::run_sweep(config, {jobs, nullptr});
        }
        py::dict d;
        d["complete"] = outcome.complete;
        d["results_file"] = outcome.results_file;
        d["summary_file"] = outcome.summary_file;
        d["manifest_file"] = outcome.manifest_file;
        d["records_written"] = outcome.records_written;
        return d;
      },
      py::arg("config"), py::arg("out"), py::arg("seed") = py::none(), py::arg("jobs") = 1);

  m.def("emit_plots", &plot::emit_plots, py::arg("results"), py::arg("out"));
}
