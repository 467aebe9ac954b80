#include "selfrep/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace selfrep {

namespace {

// Shared by ProbVec and channel columns: reject genuinely negative entries,
// clamp dust, renormalize small total deviations.
void sanitize_weights(std::vector<double>& w, const char* what) {
  for (double& x : w) {
    if (x < -tol::dust) {
      throw std::invalid_argument(std::string(what) + ": negative weight " +
                                  std::to_string(x));
    }
    if (x < 0.0) x = 0.0;
  }
  double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::abs(sum - 1.0) > tol::construction) {
    throw std::invalid_argument(std::string(what) + ": weights sum to " +
                                std::to_string(sum));
  }
  for (double& x : w) x /= sum;
}

}  // namespace

ProbVec::ProbVec(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("ProbVec: empty weights");
  sanitize_weights(weights_, "ProbVec");
}

JointProb::JointProb(std::vector<double> weights, std::vector<std::size_t> subsystem_dims)
    : JointProb(ProbVec(std::move(weights)), std::move(subsystem_dims)) {}

JointProb::JointProb(ProbVec flat, std::vector<std::size_t> subsystem_dims)
    : flat_(std::move(flat)), dims_(std::move(subsystem_dims)) {
  if (dims_.empty()) throw std::invalid_argument("JointProb: no subsystems");
  std::size_t prod = 1;
  for (std::size_t d : dims_) {
    if (d == 0) throw std::invalid_argument("JointProb: zero subsystem dim");
    prod *= d;
  }
  if (prod != flat_.dim()) {
    throw std::invalid_argument("JointProb: dims product " + std::to_string(prod) +
                                " != weight count " + std::to_string(flat_.dim()));
  }
}

StochasticChannel::StochasticChannel(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) {
    throw std::invalid_argument("StochasticChannel: empty matrix");
  }
  for (Eigen::Index c = 0; c < matrix_.cols(); ++c) {
    std::vector<double> col(static_cast<std::size_t>(matrix_.rows()));
    for (Eigen::Index r = 0; r < matrix_.rows(); ++r) col[static_cast<std::size_t>(r)] = matrix_(r, c);
    sanitize_weights(col, "StochasticChannel column");
    for (Eigen::Index r = 0; r < matrix_.rows(); ++r) matrix_(r, c) = col[static_cast<std::size_t>(r)];
  }
}

double bhattacharyya(const ProbVec& p, const ProbVec& q) {
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("bhattacharyya: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) s += std::sqrt(p[i] * q[i]);
  return std::clamp(s, 0.0, 1.0);
}

double bhattacharyya(const JointProb& p, const JointProb& q) {
  if (p.subsystem_dims() != q.subsystem_dims()) {
    throw std::invalid_argument("bhattacharyya: subsystem dims mismatch");
  }
  return bhattacharyya(p.flat(), q.flat());
}

double shannon_entropy(const ProbVec& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (p[i] > 0.0) s -= p[i] * std::log(p[i]);
  }
  return std::max(s, 0.0);
}

double shannon_entropy(const JointProb& p) { return shannon_entropy(p.flat()); }

double l1_distance(const ProbVec& p, const ProbVec& q) {
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("l1_distance: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) s += std::abs(p[i] - q[i]);
  return s;
}

JointProb tensor(const ProbVec& p, const ProbVec& q) {
  std::vector<double> w(p.dim() * q.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    for (std::size_t j = 0; j < q.dim(); ++j) w[i * q.dim() + j] = p[i] * q[j];
  }
  return JointProb(std::move(w), {p.dim(), q.dim()});
}

namespace {

// Strides of the row-major flattening: stride of the last subsystem is 1.
std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

}  // namespace

JointProb marginalize(const JointProb& joint, std::span<const std::size_t> keep) {
  const auto& dims = joint.subsystem_dims();
  if (keep.empty()) throw std::invalid_argument("marginalize: empty keep set");
  for (std::size_t k : keep) {
    if (k >= dims.size()) throw std::invalid_argument("marginalize: subsystem index out of range");
  }
  std::vector<std::size_t> out_dims;
  for (std::size_t k : keep) out_dims.push_back(dims[k]);
  std::size_t out_total = 1;
  for (std::size_t d : out_dims) out_total *= d;

  const auto strides = strides_of(dims);
  const auto out_strides = strides_of(out_dims);
  std::vector<double> out(out_total, 0.0);
  const auto& w = joint.flat().weights();
  for (std::size_t flat = 0; flat < w.size(); ++flat) {
    std::size_t out_flat = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      std::size_t idx = (flat / strides[keep[k]]) % dims[keep[k]];
      out_flat += idx * out_strides[k];
    }
    out[out_flat] += w[flat];
  }
  return JointProb(std::move(out), std::move(out_dims));
}

ProbVec marginal(const JointProb& joint, std::size_t keep) {
  const std::size_t ks[1] = {keep};
  return marginalize(joint, ks).flat();
}

ProbVec apply_channel(const StochasticChannel& channel, const ProbVec& p) {
  if (channel.in_dim() != p.dim()) {
    throw std::invalid_argument("apply_channel: dimension mismatch");
  }
  Eigen::Map<const Eigen::VectorXd> v(p.weights().data(), static_cast<Eigen::Index>(p.dim()));
  Eigen::VectorXd out = channel.matrix() * v;
  return ProbVec(std::vector<double>(out.data(), out.data() + out.size()));
}

StochasticChannel identity_channel(std::size_t dim) {
  return StochasticChannel(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim),
                                                     static_cast<Eigen::Index>(dim)));
}

StochasticChannel tensor(const StochasticChannel& a, const StochasticChannel& b) {
  const auto& A = a.matrix();
  const auto& B = b.matrix();
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return StochasticChannel(std::move(K));
}

ProbVec random_state(std::size_t dim, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("random_state: dim must be >= 1");
  std::vector<double> w(dim);
  double sum = 0.0;
  for (double& x : w) {
    x = rng.exponential();
    sum += x;
  }
  for (double& x : w) x /= sum;
  return ProbVec(std::move(w));
}

ProbVec random_state(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_state(dim, rng);
}

StochasticChannel random_channel(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  if (in_dim == 0 || out_dim == 0) {
    throw std::invalid_argument("random_channel: dims must be >= 1");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    ProbVec col = random_state(out_dim, rng);
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = col[static_cast<std::size_t>(r)];
  }
  return StochasticChannel(std::move(m));
}

StochasticChannel random_channel(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_channel(in_dim, out_dim, rng);
}

}  // namespace selfrep
