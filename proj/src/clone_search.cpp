#include "selfrep/clone_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "selfrep/optimize.hpp"

namespace selfrep {

namespace {

BroadcastDims resolve_dims(std::size_t system, std::size_t env, std::size_t remainder) {
  BroadcastDims d;
  d.system = system;
  d.env = env;
  d.remainder = remainder == 0 ? env : remainder;
  return d;
}

// Column-wise softmax of a logit block.
StochasticChannel channel_from_logits(std::span<const double> logits, std::size_t out_dim,
                                      std::size_t in_dim) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
  for (std::size_t c = 0; c < in_dim; ++c) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < out_dim; ++r) peak = std::max(peak, logits[c * out_dim + r]);
    double sum = 0.0;
    for (std::size_t r = 0; r < out_dim; ++r) {
      double e = std::exp(logits[c * out_dim + r] - peak);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = e;
      sum += e;
    }
    for (std::size_t r = 0; r < out_dim; ++r) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) /= sum;
    }
  }
  return StochasticChannel(std::move(m));
}

// Thin-QR orthonormalization of a complex parameter block into an isometry,
// sliced into Kraus operators on the trailing index.
KrausChannel channel_from_isometry_params(std::span<const double> params, std::size_t out_dim,
                                          std::size_t in_dim, std::size_t rank) {
  const auto rows = static_cast<Eigen::Index>(out_dim * rank);
  const auto cols = static_cast<Eigen::Index>(in_dim);
  ComplexMatrix g(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      g(r, c) = std::complex<double>(params[k], params[k + 1]);
      k += 2;
    }
  }
  // Guard against a degenerate (rank-deficient) parameter block.
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix iso = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  std::vector<ComplexMatrix> ops(rank, ComplexMatrix::Zero(static_cast<Eigen::Index>(out_dim), cols));
  for (std::size_t o = 0; o < out_dim; ++o) {
    for (std::size_t e = 0; e < rank; ++e) {
      ops[e].row(static_cast<Eigen::Index>(o)) = iso.row(static_cast<Eigen::Index>(o * rank + e));
    }
  }
  return KrausChannel(std::move(ops));
}

template <typename Channel, typename State, typename Setup>
double objective_impl(const Channel& channel, const std::vector<State>& targets,
                      const State& env, const BroadcastDims& dims) {
  Setup setup{channel, env, dims};
  double worst = 1.0;
  for (const auto& target : targets) {
    auto outcome = broadcast(setup, target);
    double f;
    if constexpr (std::is_same_v<State, ProbVec>) {
      f = bhattacharyya(outcome.joint, tensor(target, target));
    } else {
      f = uhlmann_fidelity(outcome.joint, tensor(target, target));
    }
    worst = std::min(worst, f);
  }
  return worst;
}

}  // namespace

double clone_objective(const StochasticChannel& channel, const std::vector<ProbVec>& targets,
                       const ProbVec& env, const BroadcastDims& dims) {
  return objective_impl<StochasticChannel, ProbVec, ClassicalBroadcastSetup>(channel, targets,
                                                                             env, dims);
}

double clone_objective(const KrausChannel& channel, const std::vector<DensityMatrix>& targets,
                       const DensityMatrix& env, const BroadcastDims& dims) {
  return objective_impl<KrausChannel, DensityMatrix, QuantumBroadcastSetup>(channel, targets,
                                                                            env, dims);
}

CloneSearchResult clone_search(const std::vector<ProbVec>& targets, const ProbVec& env,
                               const CloneSearchConfig& config) {
  if (targets.empty()) throw std::invalid_argument("clone_search: no targets");
  const std::size_t d = targets[0].dim();
  for (const auto& t : targets) {
    if (t.dim() != d) throw std::invalid_argument("clone_search: target dims differ");
  }
  const BroadcastDims dims = resolve_dims(d, env.dim(), config.remainder_dim);
  const std::size_t out_dim = dims.out_total();
  const std::size_t in_dim = dims.in_total();
  const std::size_t n_params = out_dim * in_dim;

  auto neg_objective = [&](std::span<const double> logits) {
    return -clone_objective(channel_from_logits(logits, out_dim, in_dim), targets, env, dims);
  };

  NelderMeadOptions options;
  options.max_evals = config.max_evals;

  CloneSearchResult best{identity_channel(1), -1.0, {}, false, dims};
  std::size_t evals_before = 0;
  for (std::size_t restart = 0; restart < config.restarts; ++restart) {
    std::vector<double> start(n_params, 0.0);
    if (restart == 0) {
      // Deterministic start: the diagonal copier lifted to the full output
      // space, expressed in logits.
      for (std::size_t c = 0; c < in_dim; ++c) {
        std::size_t sys_in = c / dims.env;
        std::size_t env_in = c % dims.env;
        std::size_t row = (sys_in * d + sys_in) * dims.remainder +
                          env_in % dims.remainder;
        start[c * out_dim + row] = 30.0;
      }
    } else {
      Rng rng(derive_seed(config.seed, "clone-restart", restart));
      for (double& x : start) x = 2.0 * rng.normal();
    }
    NelderMeadResult r = nelder_mead(neg_objective, start, options);
    if (-r.fx > best.objective) {
      best.objective = -r.fx;
      best.best_channel = channel_from_logits(r.x, out_dim, in_dim);
      best.converged = r.converged;
      best.trace.clear();
      for (auto [e, f] : r.history) best.trace.emplace_back(evals_before + e, -f);
    }
    evals_before += r.evals;
  }

  // The stored objective is always the re-evaluation of the stored channel.
  best.objective =
      clone_objective(std::get<StochasticChannel>(best.best_channel), targets, env, dims);
  return best;
}

CloneSearchResult clone_search(const std::vector<DensityMatrix>& targets,
                               const DensityMatrix& env, const CloneSearchConfig& config) {
  if (targets.empty()) throw std::invalid_argument("clone_search: no targets");
  const std::size_t d = targets[0].dim();
  if (d != 2) {
    throw std::invalid_argument("clone_search: quantum search is restricted to qubit targets");
  }
  for (const auto& t : targets) {
    if (t.dim() != d) throw std::invalid_argument("clone_search: target dims differ");
  }
  const BroadcastDims dims = resolve_dims(d, env.dim(), config.remainder_dim);
  const std::size_t out_dim = dims.out_total();
  const std::size_t in_dim = dims.in_total();
  const std::size_t rank = std::max<std::size_t>(config.kraus_rank, 1);
  const std::size_t n_params = 2 * out_dim * rank * in_dim;

  auto neg_objective = [&](std::span<const double> params) {
    return -clone_objective(channel_from_isometry_params(params, out_dim, in_dim, rank),
                            targets, env, dims);
  };

  NelderMeadOptions options;
  options.max_evals = config.max_evals;
  options.initial_step = 0.5;

  CloneSearchResult best{identity_kraus(1), -1.0, {}, false, dims};
  std::size_t evals_before = 0;
  for (std::size_t restart = 0; restart < config.restarts; ++restart) {
    std::vector<double> start(n_params);
    Rng rng(derive_seed(config.seed, "clone-restart-q", restart));
    for (double& x : start) x = rng.normal();
    if (restart == 0 && commute_check(targets)) {
      // Commuting targets admit a perfect copier; start there.
      KrausChannel perfect = commuting_broadcaster(targets);
      KrausChannel lifted = dims.env > 1 ? tensor(perfect, identity_kraus(dims.env)) : perfect;
      if (lifted.out_dim() == out_dim && lifted.in_dim() == in_dim &&
          lifted.kraus_ops().size() <= rank) {
        std::fill(start.begin(), start.end(), 0.0);
        std::size_t k = 0;
        for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(out_dim); ++r) {
          for (std::size_t e = 0; e < rank; ++e) {
            for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(in_dim); ++c) {
              std::complex<double> v =
                  e < lifted.kraus_ops().size() ? lifted.kraus_ops()[e](r, c) : 0.0;
              std::size_t base = 2 * ((static_cast<std::size_t>(r) * rank + e) * in_dim +
                                      static_cast<std::size_t>(c));
              start[base] = v.real();
              start[base + 1] = v.imag();
              ++k;
            }
          }
        }
        (void)k;
      }
    }
    NelderMeadResult r = nelder_mead(neg_objective, start, options);
    if (-r.fx > best.objective) {
      best.objective = -r.fx;
      best.best_channel = channel_from_isometry_params(r.x, out_dim, in_dim, rank);
      best.converged = r.converged;
      best.trace.clear();
      for (auto [e, f] : r.history) best.trace.emplace_back(evals_before + e, -f);
    }
    evals_before += r.evals;
  }

  best.objective =
      clone_objective(std::get<KrausChannel>(best.best_channel), targets, env, dims);
  return best;
}

}  // namespace selfrep
