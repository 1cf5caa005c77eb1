#include "crowdc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace crowdc::plot {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 55;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick step of 1, 2 or 5 times a power of ten giving about five ticks.
double nice_step(double range) {
  if (!(range > 0)) return 1.0;
  const double raw = range / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10 * mag;
}

struct Axis {
  double lo;
  double hi;
  double step;
};

Axis make_axis(double lo, double hi) {
  if (lo == hi) {
    const double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  const double step = nice_step(hi - lo);
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

}  // namespace

std::string render_svg(const Chart& chart) {
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : chart.series) {
    for (double x : s.x) x_lo = std::min(x_lo, x), x_hi = std::max(x_hi, x);
    for (double y : s.y) y_lo = std::min(y_lo, y), y_hi = std::max(y_hi, y);
  }
  if (!std::isfinite(x_lo)) x_lo = x_hi = y_lo = y_hi = 0;
  const Axis xa = make_axis(x_lo, x_hi);
  const Axis ya = make_axis(y_lo, y_hi);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xa.lo) / (xa.hi - xa.lo) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - (y - ya.lo) / (ya.hi - ya.lo) * plot_h; };

  std::ostringstream svg;
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  svg << fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  svg << fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kLeft + plot_w / 2, escape(chart.title));

  // Grid and ticks.
  for (double v = xa.lo; v <= xa.hi + xa.step / 2; v += xa.step) {
    svg << fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{3:.2f}\" text-anchor=\"middle\">{4:g}</text>\n",
        px(v), kTop, kTop + plot_h, kTop + plot_h + 16, v);
  }
  for (double v = ya.lo; v <= ya.hi + ya.step / 2; v += ya.step) {
    svg << fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:g}</text>\n",
        kLeft, py(v), kLeft + plot_w, kLeft - 6, py(v) + 4, v);
  }
  svg << fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  svg << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + plot_w / 2, kHeight - 15, escape(chart.x_label));
  svg << fmt::format(
      "<text x=\"18\" y=\"{0:.2f}\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0:.2f})\">{1}</text>\n",
      kTop + plot_h / 2, escape(chart.y_label));

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    const char* color = kColors[i % std::size(kColors)];
    std::string points;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      points += fmt::format("{:.2f},{:.2f} ", px(s.x[k]), py(s.y[k]));
    }
    if (s.x.size() > 1) {
      svg << fmt::format(
          "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{}/>\n", points,
          color, s.dashed ? " stroke-dasharray=\"6 4\"" : "");
    }
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      svg << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"/>\n",
                         px(s.x[k]), py(s.y[k]), color);
    }
    const double ly = kTop + 12 + 20 * static_cast<double>(i);
    const double lx = kLeft + plot_w + 15;
    svg << fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" "
        "stroke-width=\"2\"{4}/>\n<text x=\"{5:.2f}\" y=\"{6:.2f}\">{7}</text>\n",
        lx, ly, lx + 24, color, s.dashed ? " stroke-dasharray=\"6 4\"" : "", lx + 30, ly + 4,
        escape(s.label));
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<fs::path> emit_plots(const fs::path& results_file, const fs::path& output_directory) {
  std::ifstream in(results_file);
  if (!in) throw sweep::MalformedResults(fmt::format("cannot open '{}'", results_file.string()));
  const auto records = sweep::read_results_csv(in);
  if (records.empty()) throw sweep::MalformedResults("results table has no records");
  const auto cells = sweep::summarize(records);

  fs::create_directories(output_directory);
  std::vector<fs::path> written;
  auto write = [&](const fs::path& name, const std::string& text) {
    const fs::path path = output_directory / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out << text;
    written.push_back(path);
  };

  std::ostringstream data;
  sweep::write_summary_csv(data, cells);
  write("plot_data.csv", data.str());

  // Pair counts do not depend on t or r; the per-n mean is the count itself.
  std::map<int, double> btl_pairs;
  std::map<std::tuple<int, int, double>, double> btl_tau;  // (n, t, r)
  std::map<std::pair<int, int>, std::map<int, std::pair<double, double>>> cost;  // (g,p) -> n
  std::map<std::tuple<int, double, int, int>, std::map<int, double>> accuracy;  // -> t
  for (const auto& c : cells) {
    if (c.method == Method::kBTL) {
      btl_pairs[c.n] = c.unique_pairs_mean;
      btl_tau[{c.n, c.t, c.r}] = c.tau_mean;
      continue;
    }
    cost[{c.g, c.p}][c.n] = {c.unique_pairs_mean,
                             static_cast<double>(c.naive_total) / static_cast<double>(c.t)};
    accuracy[{c.n, c.r, c.g, c.p}][c.t] = c.tau_mean;
  }

  for (const auto& [gp, by_n] : cost) {
    Series shared{"CrowDC (shared)", {}, {}, false};
    Series naive{"CrowDC (naive)", {}, {}, true};
    Series baseline{"BTL", {}, {}, false};
    for (const auto& [n, pairs] : by_n) {
      shared.x.push_back(n);
      shared.y.push_back(pairs.first);
      naive.x.push_back(n);
      naive.y.push_back(pairs.second);
      if (auto it = btl_pairs.find(n); it != btl_pairs.end()) {
        baseline.x.push_back(n);
        baseline.y.push_back(it->second);
      }
    }
    Chart chart{fmt::format("Comparisons per repetition (g={}, p={})", gp.first, gp.second),
                "n (items)", "# compared pairs", {}};
    if (!baseline.x.empty()) chart.series.push_back(std::move(baseline));
    chart.series.push_back(std::move(shared));
    chart.series.push_back(std::move(naive));
    write(fmt::format("cost_g{}_p{}.svg", gp.first, gp.second), render_svg(chart));
  }

  for (const auto& [key, by_t] : accuracy) {
    const auto& [n, r, g, p] = key;
    Series crowdc{"CrowDC", {}, {}, false};
    Series baseline{"BTL", {}, {}, false};
    for (const auto& [t, tau] : by_t) {
      crowdc.x.push_back(t);
      crowdc.y.push_back(tau);
      if (auto it = btl_tau.find({n, t, r}); it != btl_tau.end()) {
        baseline.x.push_back(t);
        baseline.y.push_back(it->second);
      }
    }
    Chart chart{fmt::format("Kendall tau (n={}, r={}, g={}, p={})", n, r, g, p),
                "t (comparisons per pair)", "mean Kendall tau", {}};
    if (!baseline.x.empty()) chart.series.push_back(std::move(baseline));
    chart.series.push_back(std::move(crowdc));
    write(fmt::format("accuracy_n{}_r{}_g{}_p{}.svg", n, r, g, p), render_svg(chart));
  }
  return written;
}

}  // namespace crowdc::plot
