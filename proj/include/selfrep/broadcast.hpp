// Replication dynamics: a channel T acting on system x environment whose
// output splits into parent, offspring, and an environment remainder.
// Includes the perfect deterministic copier for classical states, its
// quantum counterpart for commuting families, and verdict objects for the
// copying dichotomy and the overlap inequality chain.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "selfrep/classical.hpp"
#include "selfrep/quantum.hpp"

namespace selfrep {

// Input is system (dim d) x environment (dim e); output is parent x offspring
// x remainder, dims d x d x r.
struct BroadcastDims {
  std::size_t system = 2;
  std::size_t env = 1;
  std::size_t remainder = 1;

  std::size_t in_total() const { return system * env; }
  std::size_t out_total() const { return system * system * remainder; }
};

struct ClassicalBroadcastSetup {
  StochasticChannel channel;
  ProbVec env_state;
  BroadcastDims dims;
};

struct QuantumBroadcastSetup {
  KrausChannel channel;
  DensityMatrix env_state;
  BroadcastDims dims;
};

struct ClassicalBroadcastOutcome {
  JointProb joint;            // parent x offspring, dims [d, d]
  ProbVec parent_marginal;
  ProbVec offspring_marginal;
  ProbVec env_remainder;
};

struct QuantumBroadcastOutcome {
  DensityMatrix joint;        // parent x offspring, dim d*d
  DensityMatrix parent_marginal;
  DensityMatrix offspring_marginal;
  DensityMatrix env_remainder;
};

ClassicalBroadcastOutcome broadcast(const ClassicalBroadcastSetup& setup, const ProbVec& state);
QuantumBroadcastOutcome broadcast(const QuantumBroadcastSetup& setup, const DensityMatrix& state);

// Deterministic copier: basis state i maps to the pair (i, i). Both marginals
// of the output reproduce the input exactly.
StochasticChannel diag_broadcaster(std::size_t dim);

// Its quantum counterpart for a pairwise commuting family: rotate to the
// common eigenbasis, copy the diagonal, rotate both output factors back.
// Rejects non-commuting families.
KrausChannel commuting_broadcaster(std::span<const DensityMatrix> states);

// Whether the dynamics turned each input into a parent-offspring product copy
// of itself, and, when both did, whether the inputs obey the overlap
// dichotomy (equal or disjoint). Also reports the inequality chain
//   (phi|phi') <= (Joint|Joint')(remainder|remainder') <= (phi|phi')^2
// that forces the dichotomy.
struct CloneVerdict {
  bool first_cloned = false;
  bool second_cloned = false;
  double first_residual = 0.0;   // distance of joint from state x state
  double second_residual = 0.0;
  double overlap = 0.0;          // input overlap (phi|phi')
  bool dichotomy_ok = true;      // vacuously true unless both cloned
  double chain_lhs = 0.0;
  double chain_mid = 0.0;
  double chain_rhs = 0.0;
  bool chain_holds = false;

  bool both_cloned() const { return first_cloned && second_cloned; }
};

CloneVerdict verify_wigner_clone(const ClassicalBroadcastSetup& setup, const ProbVec& phi,
                                 const ProbVec& phi_prime, double tolerance);
CloneVerdict verify_wigner_clone(const QuantumBroadcastSetup& setup, const DensityMatrix& phi,
                                 const DensityMatrix& phi_prime, double tolerance);

// The overlap inequality chain for one replication step of two states under
// the same channel:
//   marginal overlaps >= joint overlap >= input overlap     (shared env)
// and, when the parent marginals reproduce the inputs,
//   offspring overlap >= input overlap,  joint overlap == input overlap.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct BroadcastInequalityVerdict {
  double input_overlap = 0.0;
  double joint_overlap = 0.0;
  double parent_overlap = 0.0;
  double offspring_overlap = 0.0;
  bool env_shared = false;
  bool parent_preserved = false;

  InequalityCheck parent_ge_joint;
  InequalityCheck offspring_ge_joint;
  InequalityCheck joint_ge_input;
  // Present only when parent_preserved and env_shared:
  std::optional<InequalityCheck> offspring_ge_input;
  std::optional<InequalityCheck> joint_eq_input;

  bool all_pass = false;
};

BroadcastInequalityVerdict verify_broadcast_inequalities(const ClassicalBroadcastSetup& setup_a,
                                                         const ProbVec& phi,
                                                         const ClassicalBroadcastSetup& setup_b,
                                                         const ProbVec& phi_prime);
BroadcastInequalityVerdict verify_broadcast_inequalities(const QuantumBroadcastSetup& setup_a,
                                                         const DensityMatrix& phi,
                                                         const QuantumBroadcastSetup& setup_b,
                                                         const DensityMatrix& phi_prime);

}  // namespace selfrep
