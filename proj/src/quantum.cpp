#include "selfrep/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace selfrep {

namespace {

using Complex = std::complex<double>;

Eigen::SelfAdjointEigenSolver<ComplexMatrix> eigh(const ComplexMatrix& m,
                                                  const char* what) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error(std::string(what) + ": eigendecomposition failed for dim " +
                             std::to_string(m.rows()));
  }
  return solver;
}

// Eigenvalues below the eigensolver's resolution (a few ulp of the largest
// one) are indistinguishable from zero; treating them as zero keeps square
// roots of rank-deficient matrices from amplifying O(eps) dust to O(sqrt(eps)).
Eigen::VectorXd clamp_spectrum(const Eigen::VectorXd& vals) {
  const double floor =
      std::max(vals.maxCoeff(), 0.0) * 8.0 * static_cast<double>(vals.size()) * 2.22e-16;
  return (vals.array() < floor).select(0.0, vals);
}

// V diag(sqrt(lambda)) V^dag with eigenvalue dust clamped at zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, const char* what) {
  auto solver = eigh(m, what);
  Eigen::VectorXd vals = clamp_spectrum(solver.eigenvalues()).cwiseSqrt();
  return solver.eigenvectors() * vals.asDiagonal() *
         solver.eigenvectors().adjoint();
}

std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
  }
  double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol::hermiticity) {
    throw std::invalid_argument("DensityMatrix: not Hermitian, max deviation " +
                                std::to_string(herm));
  }
  entries_ = 0.5 * (entries_ + entries_.adjoint().eval());
  double tr = entries_.trace().real();
  if (std::abs(tr - 1.0) > tol::construction) {
    throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr));
  }
  entries_ /= tr;
  auto solver = eigh(entries_, "DensityMatrix");
  double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -tol::eigenvalue_floor) {
    throw std::invalid_argument("DensityMatrix: eigenvalue " + std::to_string(min_eig));
  }
  if (min_eig < 0.0) {
    Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
    vals /= vals.sum();
    entries_ = solver.eigenvectors() * vals.asDiagonal() *
               solver.eigenvectors().adjoint();
  }
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus_ops) : ops_(std::move(kraus_ops)) {
  if (ops_.empty()) throw std::invalid_argument("KrausChannel: no operators");
  const Eigen::Index rows = ops_[0].rows();
  const Eigen::Index cols = ops_[0].cols();
  if (rows == 0 || cols == 0) throw std::invalid_argument("KrausChannel: empty operator");
  ComplexMatrix acc = ComplexMatrix::Zero(cols, cols);
  for (const auto& k : ops_) {
    if (k.rows() != rows || k.cols() != cols) {
      throw std::invalid_argument("KrausChannel: inconsistent operator shapes");
    }
    acc += k.adjoint() * k;
  }
  double defect = (acc - ComplexMatrix::Identity(cols, cols)).norm();
  if (defect > tol::completeness) {
    throw std::invalid_argument("KrausChannel: completeness defect " +
                                std::to_string(defect));
  }
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("uhlmann_fidelity: dimension mismatch");
  }
  ComplexMatrix root = psd_sqrt(rho.entries(), "uhlmann_fidelity");
  ComplexMatrix inner = root * sigma.entries() * root;
  inner = 0.5 * (inner + inner.adjoint().eval());
  auto solver = eigh(inner, "uhlmann_fidelity");
  double f = clamp_spectrum(solver.eigenvalues()).cwiseSqrt().sum();
  return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  ComplexMatrix diff = rho.entries() - sigma.entries();
  auto solver = eigh(diff, "trace_distance");
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

DensityMatrix diag_embed(const ProbVec& p) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(p.dim()),
                                        static_cast<Eigen::Index>(p.dim()));
  for (std::size_t i = 0; i < p.dim(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i];
  return DensityMatrix(std::move(m));
}

DensityMatrix diag_embed(const ProbVec& p, const ComplexMatrix& basis) {
  const auto n = static_cast<Eigen::Index>(p.dim());
  if (basis.rows() != n || basis.cols() != n) {
    throw std::invalid_argument("diag_embed: basis shape mismatch");
  }
  double defect = (basis.adjoint() * basis - ComplexMatrix::Identity(n, n)).norm();
  if (defect > tol::unitarity) {
    throw std::invalid_argument("diag_embed: basis not unitary, defect " +
                                std::to_string(defect));
  }
  Eigen::VectorXcd vals(n);
  for (Eigen::Index i = 0; i < n; ++i) vals(i) = p[static_cast<std::size_t>(i)];
  return DensityMatrix(basis * vals.asDiagonal() * basis.adjoint());
}

DensityMatrix partial_trace_keep(const DensityMatrix& rho,
                                 std::span<const std::size_t> subsystem_dims,
                                 std::span<const std::size_t> keep) {
  std::size_t total = 1;
  for (std::size_t d : subsystem_dims) total *= d;
  if (total != rho.dim()) {
    throw std::invalid_argument("partial_trace: dims product != matrix dim");
  }
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  for (std::size_t k : keep) {
    if (k >= subsystem_dims.size()) {
      throw std::invalid_argument("partial_trace: subsystem index out of range");
    }
  }
  std::vector<std::size_t> out_dims;
  for (std::size_t k : keep) out_dims.push_back(subsystem_dims[k]);
  std::size_t out_total = 1;
  for (std::size_t d : out_dims) out_total *= d;

  const auto strides = strides_of(subsystem_dims);
  const auto out_strides = strides_of(out_dims);

  // Precompute the kept part and the discard signature of every flat index.
  std::vector<std::size_t> kept_part(total), discard_part(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t kp = 0, dp = 0, dstride = 1;
    for (std::size_t s = subsystem_dims.size(); s-- > 0;) {
      std::size_t idx = (flat / strides[s]) % subsystem_dims[s];
      auto it = std::find(keep.begin(), keep.end(), s);
      if (it != keep.end()) {
        kp += idx * out_strides[static_cast<std::size_t>(it - keep.begin())];
      } else {
        dp += idx * dstride;
        dstride *= subsystem_dims[s];
      }
    }
    kept_part[flat] = kp;
    discard_part[flat] = dp;
  }

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(out_total),
                                          static_cast<Eigen::Index>(out_total));
  const auto& m = rho.entries();
  for (std::size_t r = 0; r < total; ++r) {
    for (std::size_t c = 0; c < total; ++c) {
      if (discard_part[r] != discard_part[c]) continue;
      out(static_cast<Eigen::Index>(kept_part[r]), static_cast<Eigen::Index>(kept_part[c])) +=
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const std::size_t> subsystem_dims,
                            std::size_t keep) {
  const std::size_t ks[1] = {keep};
  return partial_trace_keep(rho, subsystem_dims, ks);
}

DensityMatrix apply_kraus(const KrausChannel& channel, const DensityMatrix& rho) {
  if (channel.in_dim() != rho.dim()) {
    throw std::invalid_argument("apply_kraus: dimension mismatch");
  }
  const auto out = static_cast<Eigen::Index>(channel.out_dim());
  ComplexMatrix acc = ComplexMatrix::Zero(out, out);
  for (const auto& k : channel.kraus_ops()) acc += k * rho.entries() * k.adjoint();
  return DensityMatrix(std::move(acc));
}

DensityMatrix tensor(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const auto& a = rho.entries();
  const auto& b = sigma.entries();
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return DensityMatrix(std::move(out));
}

KrausChannel identity_kraus(std::size_t dim) {
  std::vector<ComplexMatrix> ops;
  ops.push_back(ComplexMatrix::Identity(static_cast<Eigen::Index>(dim),
                                        static_cast<Eigen::Index>(dim)));
  return KrausChannel(std::move(ops));
}

KrausChannel tensor(const KrausChannel& a, const KrausChannel& b) {
  std::vector<ComplexMatrix> ops;
  for (const auto& ka : a.kraus_ops()) {
    for (const auto& kb : b.kraus_ops()) {
      ComplexMatrix out(ka.rows() * kb.rows(), ka.cols() * kb.cols());
      for (Eigen::Index i = 0; i < ka.rows(); ++i) {
        for (Eigen::Index j = 0; j < ka.cols(); ++j) {
          out.block(i * kb.rows(), j * kb.cols(), kb.rows(), kb.cols()) = ka(i, j) * kb;
        }
      }
      ops.push_back(std::move(out));
    }
  }
  return KrausChannel(std::move(ops));
}

double commutator_norm(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("commutator_norm: dimension mismatch");
  }
  ComplexMatrix c = a.entries() * b.entries() - b.entries() * a.entries();
  Eigen::JacobiSVD<ComplexMatrix> svd(c);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
}

bool commute_check(std::span<const DensityMatrix> states) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      if (commutator_norm(states[i], states[j]) > tol::commutator) return false;
    }
  }
  return true;
}

namespace {

// Refine `basis` so that every matrix in `mats` is diagonal in it. Works on
// one invariant block at a time: diagonalize a generic combination, split the
// spectrum into clusters, recurse into clusters wider than one column.
void refine_block(std::vector<ComplexMatrix>& mats, ComplexMatrix& basis,
                  Eigen::Index col0, Eigen::Index width, Rng& rng, int depth) {
  if (width <= 1) return;

  ComplexMatrix block_basis = basis.middleCols(col0, width);
  std::vector<ComplexMatrix> restricted;
  restricted.reserve(mats.size());
  double off_diag = 0.0;
  for (const auto& m : mats) {
    ComplexMatrix r = block_basis.adjoint() * m * block_basis;
    off_diag = std::max(off_diag, (r - ComplexMatrix(r.diagonal().asDiagonal())).cwiseAbs().maxCoeff());
    restricted.push_back(std::move(r));
  }
  if (off_diag <= 1e-13 || depth > 48) return;

  ComplexMatrix combo = ComplexMatrix::Zero(width, width);
  for (const auto& r : restricted) combo += (0.25 + rng.uniform()) * r;
  combo = 0.5 * (combo + combo.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(combo);
  basis.middleCols(col0, width) = block_basis * solver.eigenvectors();

  // Cluster nearly equal eigenvalues; recurse into each multi-column cluster.
  const auto& vals = solver.eigenvalues();
  const double gap = 1e-10 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= width; ++i) {
    if (i == width || vals(i) - vals(i - 1) > gap) {
      refine_block(mats, basis, col0 + start, i - start, rng, depth + 1);
      start = i;
    }
  }
}

}  // namespace

SimultaneousDiagonalization simultaneous_diagonalization(
    std::span<const DensityMatrix> states) {
  if (states.empty()) {
    throw std::invalid_argument("simultaneous_diagonalization: empty family");
  }
  const std::size_t dim = states[0].dim();
  for (const auto& s : states) {
    if (s.dim() != dim) {
      throw std::invalid_argument("simultaneous_diagonalization: dimension mismatch");
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      worst = std::max(worst, commutator_norm(states[i], states[j]));
    }
  }
  if (worst > tol::commutator) {
    throw std::invalid_argument(
        "simultaneous_diagonalization: family does not commute, commutator norm " +
        std::to_string(worst));
  }

  std::vector<ComplexMatrix> mats;
  mats.reserve(states.size());
  for (const auto& s : states) mats.push_back(s.entries());

  // Fixed internal seed: the combination coefficients are an implementation
  // detail and must not change results between calls.
  Rng rng(0x5e1fd1a6u);
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix basis = ComplexMatrix::Identity(n, n);
  refine_block(mats, basis, 0, n, rng, 0);

  SimultaneousDiagonalization result{std::move(basis), {}};
  for (const auto& s : states) {
    ComplexMatrix d = result.basis.adjoint() * s.entries() * result.basis;
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i) p[i] = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    ProbVec dist(std::move(p));
    ComplexMatrix recon = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) recon(i, i) = dist[static_cast<std::size_t>(i)];
    recon = result.basis * recon * result.basis.adjoint();
    double err = (recon - s.entries()).cwiseAbs().maxCoeff();
    if (err > tol::simdiag_reconstruction) {
      throw std::runtime_error(
          "simultaneous_diagonalization: reconstruction error " + std::to_string(err));
    }
    result.distributions.push_back(std::move(dist));
  }
  return result;
}

DensityMatrix random_density(std::size_t dim, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("random_density: dim must be >= 1");
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix(std::move(m));
}

DensityMatrix random_density(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(dim, rng);
}

KrausChannel random_cptp(std::size_t in_dim, std::size_t out_dim,
                         std::size_t env_dim, Rng& rng) {
  if (in_dim == 0 || out_dim == 0 || env_dim == 0) {
    throw std::invalid_argument("random_cptp: dims must be >= 1");
  }
  if (out_dim * env_dim < in_dim) {
    throw std::invalid_argument("random_cptp: out_dim * env_dim must be >= in_dim");
  }
  const auto rows = static_cast<Eigen::Index>(out_dim * env_dim);
  const auto cols = static_cast<Eigen::Index>(in_dim);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix iso = qr.householderQ() * ComplexMatrix::Identity(rows, cols);

  // Row (o, e) of the isometry, with e slowest... the composite row index is
  // o * env_dim + e per the row-major convention, so slice on e.
  std::vector<ComplexMatrix> ops(env_dim,
                                 ComplexMatrix::Zero(static_cast<Eigen::Index>(out_dim), cols));
  for (std::size_t o = 0; o < out_dim; ++o) {
    for (std::size_t e = 0; e < env_dim; ++e) {
      ops[e].row(static_cast<Eigen::Index>(o)) =
          iso.row(static_cast<Eigen::Index>(o * env_dim + e));
    }
  }
  return KrausChannel(std::move(ops));
}

KrausChannel random_cptp(std::size_t in_dim, std::size_t out_dim,
                         std::size_t env_dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_cptp(in_dim, out_dim, env_dim, rng);
}

}  // namespace selfrep
