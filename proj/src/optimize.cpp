#include "selfrep/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace selfrep {

// Standard coefficients: reflection 1, expansion 2, contraction 1/2,
// shrink 1/2.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  NelderMeadResult result;

  std::vector<std::vector<double>> verts(n + 1, std::vector<double>(x0.begin(), x0.end()));
  std::vector<double> fvals(n + 1);
  for (std::size_t i = 1; i <= n; ++i) verts[i][i - 1] += options.initial_step;

  auto eval = [&](std::span<const double> x) {
    ++result.evals;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) fvals[i] = eval(verts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n);
  double best_seen = *std::min_element(fvals.begin(), fvals.end());
  result.history.emplace_back(result.evals, best_seen);

  while (result.evals < options.max_evals) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    const std::size_t lo = order[0], hi = order[n], second_hi = order[n - 1];

    if (fvals[lo] < best_seen - 1e-15) {
      best_seen = fvals[lo];
      result.history.emplace_back(result.evals, best_seen);
    }

    double spread_f = std::abs(fvals[hi] - fvals[lo]);
    double spread_x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      spread_x = std::max(spread_x, std::abs(verts[hi][i] - verts[lo][i]));
    }
    if (spread_f <= options.f_tolerance && spread_x <= options.x_tolerance) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == hi) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += verts[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + (centroid[k] - verts[hi][k]);
    double f_reflect = eval(trial);

    if (f_reflect < fvals[lo]) {
      std::vector<double> expand(n);
      for (std::size_t k = 0; k < n; ++k) expand[k] = centroid[k] + 2.0 * (centroid[k] - verts[hi][k]);
      double f_expand = eval(expand);
      if (f_expand < f_reflect) {
        verts[hi] = std::move(expand);
        fvals[hi] = f_expand;
      } else {
        verts[hi] = trial;
        fvals[hi] = f_reflect;
      }
      continue;
    }
    if (f_reflect < fvals[second_hi]) {
      verts[hi] = trial;
      fvals[hi] = f_reflect;
      continue;
    }

    bool outside = f_reflect < fvals[hi];
    std::vector<double> contract(n);
    for (std::size_t k = 0; k < n; ++k) {
      contract[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k])
                            : centroid[k] - 0.5 * (centroid[k] - verts[hi][k]);
    }
    double f_contract = eval(contract);
    if (f_contract < std::min(f_reflect, fvals[hi])) {
      verts[hi] = std::move(contract);
      fvals[hi] = f_contract;
      continue;
    }

    for (std::size_t i = 0; i <= n; ++i) {
      if (i == lo) continue;
      for (std::size_t k = 0; k < n; ++k) {
        verts[i][k] = verts[lo][k] + 0.5 * (verts[i][k] - verts[lo][k]);
      }
      fvals[i] = eval(verts[i]);
      if (result.evals >= options.max_evals) break;
    }
  }

  std::size_t lo = static_cast<std::size_t>(
      std::min_element(fvals.begin(), fvals.end()) - fvals.begin());
  result.x = verts[lo];
  result.fx = fvals[lo];
  if (result.fx < best_seen - 1e-15) result.history.emplace_back(result.evals, result.fx);
  return result;
}

}  // namespace selfrep
