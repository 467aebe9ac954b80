#include "selfrep/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace selfrep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

AxiomReport make_report(std::string axiom, double tolerance, double margin, Json witness) {
  AxiomReport r;
  r.axiom = std::move(axiom);
  r.trials = 1;
  r.worst_violation = margin;
  r.witness = std::move(witness);
  r.tolerance = tolerance;
  r.passed = margin >= -tolerance;
  return r;
}

// A1 margin: bound checks always apply; each direction of the equality
// biconditional applies when its premise holds.
double a1_margin(double overlap, double distance) {
  double m = std::min(overlap, 1.0 - overlap);
  if (distance <= tol::state_equality) m = std::min(m, overlap - 1.0);
  if (overlap >= 1.0 - tol::a1) m = std::min(m, tol::a1 - distance);
  return m;
}

}  // namespace

Json AxiomReport::to_json() const {
  return Json{{"axiom", axiom},
              {"trials", trials},
              {"worst_violation", worst_violation},
              {"witness", witness},
              {"passed", passed}};
}

AxiomReport check_a1(const ProbVec& phi, const ProbVec& psi) {
  double margin = a1_margin(bhattacharyya(phi, psi), l1_distance(phi, psi));
  return make_report("A1", tol::a1, margin,
                     Json{{"phi", to_json(phi)}, {"psi", to_json(psi)}});
}

AxiomReport check_a1(const DensityMatrix& phi, const DensityMatrix& psi) {
  double margin = a1_margin(uhlmann_fidelity(phi, psi), trace_distance(phi, psi));
  return make_report("A1", tol::a1, margin,
                     Json{{"phi", to_json(phi)}, {"psi", to_json(psi)}});
}

AxiomReport check_a2(const ProbVec& phi, const ProbVec& psi, const ProbVec& phi_p,
                     const ProbVec& psi_p) {
  double joint = bhattacharyya(tensor(phi, psi), tensor(phi_p, psi_p));
  double product = bhattacharyya(phi, phi_p) * bhattacharyya(psi, psi_p);
  return make_report("A2", tol::a2, -std::abs(joint - product),
                     Json{{"phi", to_json(phi)},
                          {"psi", to_json(psi)},
                          {"phi_prime", to_json(phi_p)},
                          {"psi_prime", to_json(psi_p)}});
}

AxiomReport check_a2(const DensityMatrix& phi, const DensityMatrix& psi,
                     const DensityMatrix& phi_p, const DensityMatrix& psi_p) {
  double joint = uhlmann_fidelity(tensor(phi, psi), tensor(phi_p, psi_p));
  double product = uhlmann_fidelity(phi, phi_p) * uhlmann_fidelity(psi, psi_p);
  return make_report("A2", tol::a2, -std::abs(joint - product),
                     Json{{"phi", to_json(phi)},
                          {"psi", to_json(psi)},
                          {"phi_prime", to_json(phi_p)},
                          {"psi_prime", to_json(psi_p)}});
}

AxiomReport check_a3(const StochasticChannel& channel, const ProbVec& phi,
                     const ProbVec& psi) {
  double before = bhattacharyya(phi, psi);
  double after = bhattacharyya(apply_channel(channel, phi), apply_channel(channel, psi));
  return make_report("A3", tol::a3, after - before,
                     Json{{"channel", to_json(channel)},
                          {"phi", to_json(phi)},
                          {"psi", to_json(psi)}});
}

AxiomReport check_a3(const KrausChannel& channel, const DensityMatrix& phi,
                     const DensityMatrix& psi) {
  double before = uhlmann_fidelity(phi, psi);
  double after = uhlmann_fidelity(apply_kraus(channel, phi), apply_kraus(channel, psi));
  return make_report("A3", tol::a3, after - before,
                     Json{{"channel", to_json(channel)},
                          {"phi", to_json(phi)},
                          {"psi", to_json(psi)}});
}

AxiomReport check_a4(const JointProb& joint_phi, const JointProb& joint_psi) {
  if (joint_phi.subsystem_dims() != joint_psi.subsystem_dims()) {
    throw std::invalid_argument("check_a4: subsystem dims mismatch");
  }
  double joint = bhattacharyya(joint_phi, joint_psi);
  double min_marginal = kInf;
  for (std::size_t k = 0; k < joint_phi.num_subsystems(); ++k) {
    min_marginal = std::min(
        min_marginal, bhattacharyya(marginal(joint_phi, k), marginal(joint_psi, k)));
  }
  return make_report("A4", tol::a4, min_marginal - joint,
                     Json{{"joint_phi", to_json(joint_phi)},
                          {"joint_psi", to_json(joint_psi)}});
}

AxiomReport check_a4(const DensityMatrix& joint_phi, const DensityMatrix& joint_psi,
                     std::span<const std::size_t> subsystem_dims) {
  if (joint_phi.dim() != joint_psi.dim()) {
    throw std::invalid_argument("check_a4: dimension mismatch");
  }
  double joint = uhlmann_fidelity(joint_phi, joint_psi);
  double min_marginal = kInf;
  for (std::size_t k = 0; k < subsystem_dims.size(); ++k) {
    min_marginal = std::min(min_marginal,
                            uhlmann_fidelity(partial_trace(joint_phi, subsystem_dims, k),
                                             partial_trace(joint_psi, subsystem_dims, k)));
  }
  Json dims = Json::array();
  for (std::size_t d : subsystem_dims) dims.push_back(d);
  return make_report("A4", tol::a4, min_marginal - joint,
                     Json{{"joint_phi", to_json(joint_phi)},
                          {"joint_psi", to_json(joint_psi)},
                          {"subsystem_dims", dims}});
}

namespace {

// One trial of each axiom; dims cycle through the configured list.
AxiomReport a1_trial_classical(std::size_t dim, Rng& rng) {
  ProbVec p = random_state(dim, rng), q = random_state(dim, rng);
  AxiomReport distinct = check_a1(p, q);
  AxiomReport equal = check_a1(p, p);
  return distinct.worst_violation <= equal.worst_violation ? distinct : equal;
}

AxiomReport a1_trial_quantum(std::size_t dim, Rng& rng) {
  DensityMatrix p = random_density(dim, rng), q = random_density(dim, rng);
  AxiomReport distinct = check_a1(p, q);
  AxiomReport equal = check_a1(p, p);
  return distinct.worst_violation <= equal.worst_violation ? distinct : equal;
}

}  // namespace

std::vector<AxiomReport> run_axiom_suite(const SuiteConfig& config) {
  if (config.trials < 1) {
    throw std::invalid_argument("run_axiom_suite: trials must be >= 1");
  }
  if (config.dims.empty()) {
    throw std::invalid_argument("run_axiom_suite: dims must be non-empty");
  }

  const char* axiom_names[4] = {"A1", "A2", "A3", "A4"};
  std::vector<AxiomReport> reports;
  for (int a = 0; a < 4; ++a) {
    AxiomReport worst;
    bool first = true;
    for (long t = 0; t < config.trials; ++t) {
      Rng rng(derive_seed(config.seed, axiom_names[a], static_cast<std::uint64_t>(t)));
      const std::size_t d1 = config.dims[static_cast<std::size_t>(t) % config.dims.size()];
      const std::size_t d2 = config.dims[static_cast<std::size_t>(t + 1) % config.dims.size()];
      AxiomReport r;
      if (config.backend == Backend::classical) {
        switch (a) {
          case 0:
            r = a1_trial_classical(d1, rng);
            break;
          case 1:
            r = check_a2(random_state(d1, rng), random_state(d2, rng),
                         random_state(d1, rng), random_state(d2, rng));
            break;
          case 2:
            r = check_a3(random_channel(d1, d1, rng), random_state(d1, rng),
                         random_state(d1, rng));
            break;
          default: {
            ProbVec fa = random_state(d1 * d2, rng), fb = random_state(d1 * d2, rng);
            r = check_a4(JointProb(fa.weights(), {d1, d2}),
                         JointProb(fb.weights(), {d1, d2}));
            break;
          }
        }
      } else {
        switch (a) {
          case 0:
            r = a1_trial_quantum(d1, rng);
            break;
          case 1:
            r = check_a2(random_density(d1, rng), random_density(d2, rng),
                         random_density(d1, rng), random_density(d2, rng));
            break;
          case 2:
            r = check_a3(random_cptp(d1, d1, d1, rng), random_density(d1, rng),
                         random_density(d1, rng));
            break;
          default: {
            const std::size_t dims2[2] = {d1, d2};
            r = check_a4(random_density(d1 * d2, rng), random_density(d1 * d2, rng), dims2);
            break;
          }
        }
      }
      if (first || r.worst_violation < worst.worst_violation) {
        worst = std::move(r);
        first = false;
      }
    }
    worst.trials = config.trials;
    worst.passed = worst.worst_violation >= -worst.tolerance;
    reports.push_back(std::move(worst));
  }
  return reports;
}

}  // namespace selfrep
