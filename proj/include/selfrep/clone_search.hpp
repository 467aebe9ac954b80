// Channel-space search for the best approximate copier of a target family:
// maximizes the worst-case overlap between each target's parent-offspring
// joint output and the target's perfect product copy.

#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "selfrep/broadcast.hpp"

namespace selfrep {

struct CloneSearchConfig {
  std::size_t restarts = 20;
  std::size_t max_evals = 2000;
  std::uint64_t seed = 0;
  // Remainder dimension of the output; 0 means "same as the environment".
  std::size_t remainder_dim = 0;
  // Number of Kraus operators for the quantum parameterization.
  std::size_t kraus_rank = 4;
};

struct CloneSearchResult {
  std::variant<StochasticChannel, KrausChannel> best_channel;
  double objective = 0.0;  // min over targets of the clone overlap
  std::vector<std::pair<std::size_t, double>> trace;  // (evaluations, objective)
  bool converged = false;
  BroadcastDims dims;
};

// Softmax-parameterized stochastic channels explored by multi-start
// Nelder-Mead; one start is the deterministic copier, the rest are random.
CloneSearchResult clone_search(const std::vector<ProbVec>& targets, const ProbVec& env,
                               const CloneSearchConfig& config);

// Isometry-parameterized channels; restricted to qubit targets, where the
// parameter space is still tractable for a derivative-free method.
CloneSearchResult clone_search(const std::vector<DensityMatrix>& targets,
                               const DensityMatrix& env, const CloneSearchConfig& config);

// Objective re-evaluation used for the reproducibility invariant.
double clone_objective(const StochasticChannel& channel, const std::vector<ProbVec>& targets,
                       const ProbVec& env, const BroadcastDims& dims);
double clone_objective(const KrausChannel& channel, const std::vector<DensityMatrix>& targets,
                       const DensityMatrix& env, const BroadcastDims& dims);

}  // namespace selfrep
