// Multi-generation replication: each species state is broadcast against its
// assigned environment, and the offspring marginal becomes the next
// generation's parent. Records pairwise overlap matrices per generation and
// the per-step gap between the parent-offspring joint and its product of
// marginals.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selfrep/broadcast.hpp"

namespace selfrep {

// Environment policy: one shared state, or one state per species.
template <typename State>
struct EnvironmentPolicy {
  std::vector<State> omegas;  // size 1 = homogeneous, else one per species

  const State& omega_for(std::size_t species) const {
    return omegas.size() == 1 ? omegas[0] : omegas[species];
  }
  bool homogeneous() const { return omegas.size() == 1; }
};

template <typename State, typename Channel>
struct SpeciesScenario {
  std::vector<State> initial_states;
  EnvironmentPolicy<State> environment;
  Channel channel;
  BroadcastDims dims;
  std::size_t generations = 1;
};

using ClassicalSpeciesScenario = SpeciesScenario<ProbVec, StochasticChannel>;
using QuantumSpeciesScenario = SpeciesScenario<DensityMatrix, KrausChannel>;

struct SpeciesTrajectory {
  std::size_t species_count = 0;
  std::uint64_t seed = 0;
  // overlap_matrices[g](i, j): overlap of species i and j at generation g;
  // generation 0 is the initial population.
  std::vector<Eigen::MatrixXd> overlap_matrices;
  // joint_product_overlap[g][i]: overlap between the joint parent-offspring
  // state and the product of its marginals for the step g -> g+1.
  std::vector<std::vector<double>> joint_product_overlap;
};

SpeciesTrajectory species_simulate(const ClassicalSpeciesScenario& scenario, std::uint64_t seed);
SpeciesTrajectory species_simulate(const QuantumSpeciesScenario& scenario, std::uint64_t seed);

}  // namespace selfrep
