#include "selfrep/broadcast.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace selfrep {

namespace {

void check_setup_dims(std::size_t channel_in, std::size_t channel_out,
                      std::size_t env_dim, const BroadcastDims& dims) {
  if (env_dim != dims.env) {
    throw std::invalid_argument("broadcast: env state dim does not match dims.env");
  }
  if (channel_in != dims.in_total() || channel_out != dims.out_total()) {
    throw std::invalid_argument("broadcast: channel shape does not match dims");
  }
}

constexpr std::size_t kParentOffspring[2] = {0, 1};
constexpr std::size_t kRemainder[1] = {2};

}  // namespace

ClassicalBroadcastOutcome broadcast(const ClassicalBroadcastSetup& setup, const ProbVec& state) {
  check_setup_dims(setup.channel.in_dim(), setup.channel.out_dim(),
                   setup.env_state.dim(), setup.dims);
  if (state.dim() != setup.dims.system) {
    throw std::invalid_argument("broadcast: state dim does not match dims.system");
  }
  ProbVec total = apply_channel(setup.channel, tensor(state, setup.env_state).flat());
  JointProb out(total, {setup.dims.system, setup.dims.system, setup.dims.remainder});
  JointProb joint = marginalize(out, kParentOffspring);
  return ClassicalBroadcastOutcome{
      joint,
      marginal(joint, 0),
      marginal(joint, 1),
      marginalize(out, kRemainder).flat(),
  };
}

QuantumBroadcastOutcome broadcast(const QuantumBroadcastSetup& setup, const DensityMatrix& state) {
  check_setup_dims(setup.channel.in_dim(), setup.channel.out_dim(),
                   setup.env_state.dim(), setup.dims);
  if (state.dim() != setup.dims.system) {
    throw std::invalid_argument("broadcast: state dim does not match dims.system");
  }
  DensityMatrix total = apply_kraus(setup.channel, tensor(state, setup.env_state));
  const std::size_t out_dims[3] = {setup.dims.system, setup.dims.system, setup.dims.remainder};
  DensityMatrix joint = partial_trace_keep(total, out_dims, kParentOffspring);
  const std::size_t joint_dims[2] = {setup.dims.system, setup.dims.system};
  return QuantumBroadcastOutcome{
      joint,
      partial_trace(joint, joint_dims, 0),
      partial_trace(joint, joint_dims, 1),
      partial_trace_keep(total, out_dims, kRemainder),
  };
}

StochasticChannel diag_broadcaster(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("diag_broadcaster: dim must be >= 1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim * dim),
                                            static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    m(static_cast<Eigen::Index>(i * dim + i), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return StochasticChannel(std::move(m));
}

KrausChannel commuting_broadcaster(std::span<const DensityMatrix> states) {
  // Rejects non-commuting input with the offending commutator norm.
  auto sd = simultaneous_diagonalization(states);
  const auto d = static_cast<Eigen::Index>(states[0].dim());
  const ComplexMatrix& u = sd.basis;

  // K_i = (U x U) |ii><i| U^dag : copy the i-th eigenbasis component.
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index i = 0; i < d; ++i) {
    ComplexMatrix k = ComplexMatrix::Zero(d * d, d);
    // (U x U)|ii> is the Kronecker product of the i-th columns of U.
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        for (Eigen::Index c = 0; c < d; ++c) {
          k(a * d + b, c) += u(a, i) * u(b, i) * std::conj(u(c, i));
        }
      }
    }
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops));
}

namespace {

double overlap_of(const ProbVec& a, const ProbVec& b) { return bhattacharyya(a, b); }
double overlap_of(const DensityMatrix& a, const DensityMatrix& b) {
  return uhlmann_fidelity(a, b);
}
double distance_of(const ProbVec& a, const ProbVec& b) { return l1_distance(a, b); }
double distance_of(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a, b);
}

template <typename Setup, typename State>
CloneVerdict clone_verdict_impl(const Setup& setup, const State& phi, const State& phi_prime,
                                double tolerance) {
  auto out_a = broadcast(setup, phi);
  auto out_b = broadcast(setup, phi_prime);

  CloneVerdict v;
  v.overlap = overlap_of(phi, phi_prime);
  if constexpr (std::is_same_v<State, ProbVec>) {
    v.first_residual = l1_distance(out_a.joint.flat(), tensor(phi, phi).flat());
    v.second_residual = l1_distance(out_b.joint.flat(), tensor(phi_prime, phi_prime).flat());
    v.chain_mid = bhattacharyya(out_a.joint, out_b.joint) *
                  bhattacharyya(out_a.env_remainder, out_b.env_remainder);
  } else {
    v.first_residual = trace_distance(out_a.joint, tensor(phi, phi));
    v.second_residual = trace_distance(out_b.joint, tensor(phi_prime, phi_prime));
    v.chain_mid = uhlmann_fidelity(out_a.joint, out_b.joint) *
                  uhlmann_fidelity(out_a.env_remainder, out_b.env_remainder);
  }
  v.first_cloned = v.first_residual <= tolerance;
  v.second_cloned = v.second_residual <= tolerance;
  v.chain_lhs = v.overlap;
  v.chain_rhs = v.overlap * v.overlap;
  v.chain_holds = v.chain_lhs <= v.chain_mid + tol::a3 && v.chain_mid <= v.chain_rhs + tol::a3;
  if (v.both_cloned()) {
    const double dichotomy_tol = 10.0 * tolerance;
    v.dichotomy_ok = v.overlap >= 1.0 - dichotomy_tol || v.overlap <= dichotomy_tol;
  }
  return v;
}

InequalityCheck ge_check(double lhs, double rhs, double tolerance) {
  InequalityCheck c;
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = lhs - rhs;
  c.pass = c.margin >= -tolerance;
  return c;
}

InequalityCheck eq_check(double lhs, double rhs, double tolerance) {
  InequalityCheck c;
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = -std::abs(lhs - rhs);
  c.pass = c.margin >= -tolerance;
  return c;
}

template <typename Setup, typename State>
BroadcastInequalityVerdict inequalities_impl(const Setup& setup_a, const State& phi,
                                             const Setup& setup_b, const State& phi_prime) {
  auto out_a = broadcast(setup_a, phi);
  auto out_b = broadcast(setup_b, phi_prime);

  BroadcastInequalityVerdict v;
  v.input_overlap = overlap_of(phi, phi_prime);
  if constexpr (std::is_same_v<State, ProbVec>) {
    v.joint_overlap = bhattacharyya(out_a.joint, out_b.joint);
  } else {
    v.joint_overlap = uhlmann_fidelity(out_a.joint, out_b.joint);
  }
  v.parent_overlap = overlap_of(out_a.parent_marginal, out_b.parent_marginal);
  v.offspring_overlap = overlap_of(out_a.offspring_marginal, out_b.offspring_marginal);
  v.env_shared = distance_of(setup_a.env_state, setup_b.env_state) <= tol::state_equality;
  v.parent_preserved = distance_of(out_a.parent_marginal, phi) <= tol::parent_preserved &&
                       distance_of(out_b.parent_marginal, phi_prime) <= tol::parent_preserved;

  v.parent_ge_joint = ge_check(v.parent_overlap, v.joint_overlap, tol::a4);
  v.offspring_ge_joint = ge_check(v.offspring_overlap, v.joint_overlap, tol::a4);
  v.joint_ge_input = ge_check(v.joint_overlap, v.input_overlap, tol::a3);

  bool all = true;
  if (v.env_shared) {
    all = v.parent_ge_joint.pass && v.offspring_ge_joint.pass && v.joint_ge_input.pass;
    if (v.parent_preserved) {
      v.offspring_ge_input = ge_check(v.offspring_overlap, v.input_overlap, tol::a3);
      v.joint_eq_input = eq_check(v.joint_overlap, v.input_overlap, tol::parent_preserved);
      all = all && v.offspring_ge_input->pass && v.joint_eq_input->pass;
    }
  } else {
    // Different environments void the chain; only the A4 relations between
    // the two outputs are asserted.
    all = v.parent_ge_joint.pass && v.offspring_ge_joint.pass;
  }
  v.all_pass = all;
  return v;
}

}  // namespace

CloneVerdict verify_wigner_clone(const ClassicalBroadcastSetup& setup, const ProbVec& phi,
                                 const ProbVec& phi_prime, double tolerance) {
  return clone_verdict_impl(setup, phi, phi_prime, tolerance);
}

CloneVerdict verify_wigner_clone(const QuantumBroadcastSetup& setup, const DensityMatrix& phi,
                                 const DensityMatrix& phi_prime, double tolerance) {
  return clone_verdict_impl(setup, phi, phi_prime, tolerance);
}

BroadcastInequalityVerdict verify_broadcast_inequalities(const ClassicalBroadcastSetup& setup_a,
                                                         const ProbVec& phi,
                                                         const ClassicalBroadcastSetup& setup_b,
                                                         const ProbVec& phi_prime) {
  return inequalities_impl(setup_a, phi, setup_b, phi_prime);
}

BroadcastInequalityVerdict verify_broadcast_inequalities(const QuantumBroadcastSetup& setup_a,
                                                         const DensityMatrix& phi,
                                                         const QuantumBroadcastSetup& setup_b,
                                                         const DensityMatrix& phi_prime) {
  return inequalities_impl(setup_a, phi, setup_b, phi_prime);
}

}  // namespace selfrep
