// Classical state space with a universal entropy floor: a distribution is a
// valid state only if S(p) >= epsilon. Pure states sit on the S = epsilon
// surface and can overlap. For two-part systems, any mixture of product
// states has S >= 2*epsilon, so entropy below 2*epsilon witnesses
// non-separability; a heuristic decomposition search provides the
// constructive counterpart.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selfrep/classical.hpp"
#include "selfrep/rng.hpp"
#include "selfrep/tolerances.hpp"

namespace selfrep {

struct ToyStateSpace {
  double epsilon;                   // entropy floor, nats
  double purity_tol = tol::purity;  // width of the pure-state surface

  explicit ToyStateSpace(double eps, double purity = tol::purity);

  // The state set for an n-outcome system is empty when epsilon > ln n.
  bool empty_for_dim(std::size_t dim) const;
};

bool membership(const ProbVec& p, const ToyStateSpace& space);
bool membership(const JointProb& p, const ToyStateSpace& space);

// True iff p is a member with entropy within purity_tol of the floor.
// Non-members are rejected.
bool is_pure(const ProbVec& p, const ToyStateSpace& space);

// A random point on the S = epsilon surface: bisects between a random vertex
// (entropy 0) and a random interior state with entropy >= epsilon.
ProbVec sample_pure(std::size_t dim, const ToyStateSpace& space, std::uint64_t seed);
ProbVec sample_pure(std::size_t dim, const ToyStateSpace& space, Rng& rng);

// Mixes p toward uniform until S >= floor; the identity when p already
// qualifies. Requires floor <= ln(dim).
ProbVec entropy_project(const ProbVec& p, double floor);

struct SeparabilityComponent {
  double weight;
  ProbVec factor_a;
  ProbVec factor_b;
};

struct SeparabilityVerdict {
  bool witness_fired = false;  // entropy < 2*epsilon: certified non-separable
  double entropy = 0.0;
  // Present when a decomposition search ran:
  std::optional<double> search_residual;  // L1 distance of the best decomposition
  std::optional<std::vector<SeparabilityComponent>> components;

  // Constructive separability certificate: a decomposition within 1e-6 whose
  // factors all satisfy the entropy floor.
  bool certified_separable = false;
};

// Fires iff S(P) < 2*epsilon (sound for non-separability, not complete).
// P must be a two-subsystem member of the joint space.
SeparabilityVerdict entropy_witness(const JointProb& joint, const ToyStateSpace& space);

// Alternating rank-one updates on the dim_A x dim_B weight matrix with each
// factor projected onto the entropy floor; multi-restart, deterministic given
// the seed. A residual <= 1e-6 certifies separability; a large residual is
// evidence only.
SeparabilityVerdict separability_search(const JointProb& joint, const ToyStateSpace& space,
                                        std::size_t components, std::size_t iters,
                                        std::uint64_t seed);

}  // namespace selfrep
