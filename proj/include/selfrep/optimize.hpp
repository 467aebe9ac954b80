// Nelder-Mead simplex minimizer. Small, dependency-free, deterministic.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace selfrep {

struct NelderMeadOptions {
  std::size_t max_evals = 2000;
  double initial_step = 1.0;
  double f_tolerance = 1e-12;   // spread of simplex values at convergence
  double x_tolerance = 1e-10;   // spread of simplex vertices at convergence
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  std::size_t evals = 0;
  bool converged = false;
  // (evaluation count, best value) at each improvement.
  std::vector<std::pair<std::size_t, double>> history;
};

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, const NelderMeadOptions& options);

}  // namespace selfrep
