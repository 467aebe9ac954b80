#include "selfrep/species.hpp"

#include <stdexcept>

namespace selfrep {

namespace {

double overlap_of(const ProbVec& a, const ProbVec& b) { return bhattacharyya(a, b); }
double overlap_of(const DensityMatrix& a, const DensityMatrix& b) {
  return uhlmann_fidelity(a, b);
}

double joint_vs_product(const ClassicalBroadcastOutcome& out) {
  return bhattacharyya(out.joint, tensor(out.parent_marginal, out.offspring_marginal));
}
double joint_vs_product(const QuantumBroadcastOutcome& out) {
  return uhlmann_fidelity(out.joint, tensor(out.parent_marginal, out.offspring_marginal));
}

template <typename State, typename Channel, typename Setup>
SpeciesTrajectory simulate_impl(const SpeciesScenario<State, Channel>& scenario,
                                std::uint64_t seed) {
  const std::size_t count = scenario.initial_states.size();
  if (count == 0) throw std::invalid_argument("species_simulate: no species");
  if (scenario.generations < 1) {
    throw std::invalid_argument("species_simulate: generations must be >= 1");
  }
  if (!scenario.environment.homogeneous() && scenario.environment.omegas.size() != count) {
    throw std::invalid_argument("species_simulate: environment map size != species count");
  }

  SpeciesTrajectory traj;
  traj.species_count = count;
  traj.seed = seed;

  auto record_overlaps = [&](const std::vector<State>& states) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
      for (std::size_t j = i + 1; j < count; ++j) {
        double o = overlap_of(states[i], states[j]);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = o;
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = o;
      }
    }
    traj.overlap_matrices.push_back(std::move(m));
  };

  std::vector<State> population = scenario.initial_states;
  record_overlaps(population);

  for (std::size_t g = 0; g < scenario.generations; ++g) {
    std::vector<double> gaps;
    std::vector<State> next;
    next.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      Setup setup{scenario.channel, scenario.environment.omega_for(i), scenario.dims};
      auto outcome = broadcast(setup, population[i]);
      gaps.push_back(joint_vs_product(outcome));
      next.push_back(outcome.offspring_marginal);
    }
    traj.joint_product_overlap.push_back(std::move(gaps));
    population = std::move(next);
    record_overlaps(population);
  }
  return traj;
}

}  // namespace

SpeciesTrajectory species_simulate(const ClassicalSpeciesScenario& scenario, std::uint64_t seed) {
  return simulate_impl<ProbVec, StochasticChannel, ClassicalBroadcastSetup>(scenario, seed);
}

SpeciesTrajectory species_simulate(const QuantumSpeciesScenario& scenario, std::uint64_t seed) {
  return simulate_impl<DensityMatrix, KrausChannel, QuantumBroadcastSetup>(scenario, seed);
}

}  // namespace selfrep
