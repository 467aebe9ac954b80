// Finite probability distributions, their composition and marginalization,
// Shannon entropy, the Bhattacharyya overlap, and column-stochastic channels.
//
// Conventions used throughout the library:
//   - entropies are in nats (natural log),
//   - composite indices are row-major with the leftmost subsystem
//     slowest-varying: flat(i, j) = i * dim_j + j.

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "selfrep/rng.hpp"
#include "selfrep/tolerances.hpp"

namespace selfrep {

// A finite probability distribution. Immutable after construction.
// Construction clamps negative floating-point dust (entries in [-1e-12, 0))
// to zero and renormalizes when the total deviates from 1 by at most 1e-9;
// anything worse is rejected.
class ProbVec {
 public:
  explicit ProbVec(std::vector<double> weights);

  std::size_t dim() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

// A distribution over a composite index set. Stores the flattened weights
// together with the subsystem dimensions.
class JointProb {
 public:
  JointProb(std::vector<double> weights, std::vector<std::size_t> subsystem_dims);
  JointProb(ProbVec flat, std::vector<std::size_t> subsystem_dims);

  const ProbVec& flat() const { return flat_; }
  const std::vector<std::size_t>& subsystem_dims() const { return dims_; }
  std::size_t num_subsystems() const { return dims_.size(); }

 private:
  ProbVec flat_;
  std::vector<std::size_t> dims_;
};

// Column-stochastic matrix: each column is the image distribution of one
// input basis state. Columns get the same dust-clamp-and-renormalize
// treatment as ProbVec.
class StochasticChannel {
 public:
  explicit StochasticChannel(Eigen::MatrixXd matrix);

  std::size_t in_dim() const { return static_cast<std::size_t>(matrix_.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
};

// Overlap of two distributions: sum_i sqrt(p_i q_i), clamped to [0, 1].
double bhattacharyya(const ProbVec& p, const ProbVec& q);
double bhattacharyya(const JointProb& p, const JointProb& q);

// -sum p ln p in nats, with 0 ln 0 = 0.
double shannon_entropy(const ProbVec& p);
double shannon_entropy(const JointProb& p);

// L1 distance; the library's notion of classical state equality is
// l1_distance <= tol::state_equality.
double l1_distance(const ProbVec& p, const ProbVec& q);

// Product distribution with subsystem_dims = [p.dim, q.dim].
JointProb tensor(const ProbVec& p, const ProbVec& q);

// Sum over all subsystems except `keep`.
ProbVec marginal(const JointProb& joint, std::size_t keep);

// Marginal onto an ordered subset of subsystems.
JointProb marginalize(const JointProb& joint, std::span<const std::size_t> keep);

ProbVec apply_channel(const StochasticChannel& channel, const ProbVec& p);

StochasticChannel identity_channel(std::size_t dim);

// Kronecker product of channels; acts on the row-major composite index.
StochasticChannel tensor(const StochasticChannel& a, const StochasticChannel& b);

// Flat-Dirichlet state and channel samplers, deterministic given the seed.
ProbVec random_state(std::size_t dim, std::uint64_t seed);
ProbVec random_state(std::size_t dim, Rng& rng);
StochasticChannel random_channel(std::size_t in_dim, std::size_t out_dim,
                                 std::uint64_t seed);
StochasticChannel random_channel(std::size_t in_dim, std::size_t out_dim, Rng& rng);

}  // namespace selfrep
