#pragma once

// Brute-force Bradley-Terry MLE for 2- and 3-item win tables, independent of
// the library's fitter. Searches log-strength differences on a grid, then
// repeatedly zooms in around the best cell, re-centering whenever the best
// point sits on the window edge. The log-likelihood is concave in log
// strengths, so the zoom cannot lose the maximum.

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace crowdc::oracle {

// wins[i][j] = times i beat j; size 2 or 3.
using WinTable = std::vector<std::vector<int>>;

inline double bt_log_likelihood(const WinTable& wins, const std::array<double, 3>& theta) {
  double ll = 0;
  const std::size_t m = wins.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j || wins[i][j] == 0) continue;
      // log(pi_i / (pi_i + pi_j)) = -log(1 + exp(theta_j - theta_i))
      ll -= wins[i][j] * std::log1p(std::exp(theta[j] - theta[i]));
    }
  }
  return ll;
}

inline std::vector<double> to_simplex(const std::array<double, 3>& theta, std::size_t m) {
  double total = 0;
  std::vector<double> pi(m);
  for (std::size_t i = 0; i < m; ++i) total += pi[i] = std::exp(theta[i]);
  for (double& v : pi) v /= total;
  return pi;
}

// Simplex-normalized maximizer. theta_0 is pinned to 0.
inline std::vector<double> grid_search_mle(const WinTable& wins) {
  const std::size_t free = wins.size() - 1;
  std::array<double, 2> center{0.0, 0.0};
  double half_width = 10.0;
  constexpr int kSteps = 10;  // grid points per side = 2 * kSteps + 1

  auto theta_of = [&](std::array<double, 2> c) {
    return std::array<double, 3>{0.0, c[0], free == 2 ? c[1] : 0.0};
  };

  while (half_width > 1e-5) {
    const double step = half_width / kSteps;
    double best = -std::numeric_limits<double>::infinity();
    std::array<int, 2> best_k{0, 0};
    const int k1_range = free == 2 ? kSteps : 0;
    for (int k0 = -kSteps; k0 <= kSteps; ++k0) {
      for (int k1 = -k1_range; k1 <= k1_range; ++k1) {
        const double ll =
            bt_log_likelihood(wins, theta_of({center[0] + k0 * step, center[1] + k1 * step}));
        if (ll > best) {
          best = ll;
          best_k = {k0, k1};
        }
      }
    }
    center = {center[0] + best_k[0] * step, center[1] + best_k[1] * step};
    const bool on_edge = std::abs(best_k[0]) == kSteps || std::abs(best_k[1]) == kSteps;
    // Keep the window when the best point was on its edge; only re-center.
    if (!on_edge) half_width = 3 * step;
  }
  return to_simplex(theta_of(center), wins.size());
}

}  // namespace crowdc::oracle
