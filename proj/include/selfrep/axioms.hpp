// Machine checks for the four laws the overlap must satisfy on both backends:
//   A1  0 <= (phi|psi) <= 1, with equality to 1 exactly for equal states,
//   A2  the overlap factorizes over tensor products,
//   A3  channels never reduce the overlap,
//   A4  subsystem marginals overlap at least as much as the joint state.
//
// Every check reports a signed margin: the worst violation is the most
// negative margin seen, and a report passes iff it stays above -tolerance.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selfrep/classical.hpp"
#include "selfrep/io.hpp"
#include "selfrep/quantum.hpp"

namespace selfrep {

struct AxiomReport {
  std::string axiom;        // "A1".."A4"
  long trials = 0;
  double worst_violation = 0.0;  // negative = violated
  Json witness;             // serialized inputs of the worst case
  bool passed = false;
  double tolerance = 0.0;

  Json to_json() const;
};

AxiomReport check_a1(const ProbVec& phi, const ProbVec& psi);
AxiomReport check_a1(const DensityMatrix& phi, const DensityMatrix& psi);

AxiomReport check_a2(const ProbVec& phi, const ProbVec& psi, const ProbVec& phi_p,
                     const ProbVec& psi_p);
AxiomReport check_a2(const DensityMatrix& phi, const DensityMatrix& psi,
                     const DensityMatrix& phi_p, const DensityMatrix& psi_p);

AxiomReport check_a3(const StochasticChannel& channel, const ProbVec& phi,
                     const ProbVec& psi);
AxiomReport check_a3(const KrausChannel& channel, const DensityMatrix& phi,
                     const DensityMatrix& psi);

AxiomReport check_a4(const JointProb& joint_phi, const JointProb& joint_psi);
AxiomReport check_a4(const DensityMatrix& joint_phi, const DensityMatrix& joint_psi,
                     std::span<const std::size_t> subsystem_dims);

enum class Backend { classical, quantum };

struct SuiteConfig {
  Backend backend = Backend::classical;
  std::vector<std::size_t> dims{2, 3, 4};
  long trials = 1000;
  std::uint64_t seed = 0;
};

// Runs `trials` seeded random trials per axiom and aggregates the worst
// violation and its witness. Per-trial seeds derive from the master seed and
// the trial index, so the aggregate is order-independent.
std::vector<AxiomReport> run_axiom_suite(const SuiteConfig& config);

}  // namespace selfrep
