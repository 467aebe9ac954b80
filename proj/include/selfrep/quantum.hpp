// Density matrices, Uhlmann fidelity, partial trace, Kraus channels, and
// commuting-family tools. Dense complex algebra via Eigen; intended scale is
// up to 64 per subsystem and 4096 total.

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "selfrep/classical.hpp"
#include "selfrep/rng.hpp"
#include "selfrep/tolerances.hpp"

namespace selfrep {

using ComplexMatrix = Eigen::MatrixXcd;

// Hermitian, positive-semidefinite, unit-trace matrix. Construction
// symmetrizes within the hermiticity tolerance, renormalizes the trace within
// 1e-9, and clamps eigenvalue dust in [-1e-9, 0); larger violations are
// rejected.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix entries);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const ComplexMatrix& entries() const { return entries_; }

 private:
  ComplexMatrix entries_;
};

// Completely positive trace-preserving map given by Kraus operators
// (out_dim x in_dim each). Completeness sum K^dag K = I is checked to 1e-9
// in Frobenius norm.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> kraus_ops);

  std::size_t in_dim() const { return static_cast<std::size_t>(ops_[0].cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(ops_[0].rows()); }
  const std::vector<ComplexMatrix>& kraus_ops() const { return ops_; }

 private:
  std::vector<ComplexMatrix> ops_;
};

// Tr sqrt(sqrt(rho) sigma sqrt(rho)), the overlap of density matrices.
// Both square roots go through Hermitian eigendecompositions with eigenvalue
// dust clamped at zero; the result is clamped to [0, 1].
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// Half the trace norm of rho - sigma; the quantum state-equality metric.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// U diag(p) U^dag. With basis = identity this embeds a classical state on the
// computational basis; `basis` must be unitary within 1e-9.
DensityMatrix diag_embed(const ProbVec& p);
DensityMatrix diag_embed(const ProbVec& p, const ComplexMatrix& basis);

// Index contraction over the discarded subsystems; row-major composite
// indices, leftmost slowest.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const std::size_t> subsystem_dims,
                            std::size_t keep);
DensityMatrix partial_trace_keep(const DensityMatrix& rho,
                                 std::span<const std::size_t> subsystem_dims,
                                 std::span<const std::size_t> keep);

DensityMatrix apply_kraus(const KrausChannel& channel, const DensityMatrix& rho);

DensityMatrix tensor(const DensityMatrix& rho, const DensityMatrix& sigma);

KrausChannel identity_kraus(std::size_t dim);
KrausChannel tensor(const KrausChannel& a, const KrausChannel& b);

// Largest singular value of [a, b]; zero iff the states commute.
double commutator_norm(const DensityMatrix& a, const DensityMatrix& b);

// True iff every pairwise commutator norm is <= 1e-8.
bool commute_check(std::span<const DensityMatrix> states);

// Common eigenbasis of a pairwise-commuting family, plus each state's
// eigenvalue distribution in that basis. Diagonalizes a generic real linear
// combination of the family, then refines degenerate blocks recursively.
// Non-commuting input is rejected with the offending commutator norm;
// reconstruction U diag(p) U^dag is verified to 1e-8.
struct SimultaneousDiagonalization {
  ComplexMatrix basis;
  std::vector<ProbVec> distributions;
};
SimultaneousDiagonalization simultaneous_diagonalization(
    std::span<const DensityMatrix> states);

// G G^dag / Tr(G G^dag) with complex Gaussian G.
DensityMatrix random_density(std::size_t dim, std::uint64_t seed);
DensityMatrix random_density(std::size_t dim, Rng& rng);

// Orthonormalized Gaussian block matrix sliced into env_dim Kraus operators.
KrausChannel random_cptp(std::size_t in_dim, std::size_t out_dim,
                         std::size_t env_dim, std::uint64_t seed);
KrausChannel random_cptp(std::size_t in_dim, std::size_t out_dim,
                         std::size_t env_dim, Rng& rng);

}  // namespace selfrep
