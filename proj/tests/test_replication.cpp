#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "selfrep/broadcast.hpp"
#include "selfrep/clone_search.hpp"
#include "selfrep/species.hpp"

using namespace selfrep;

namespace {

// Copier lifted to a full setup: system d, environment e, remainder e.
ClassicalBroadcastSetup diag_setup(std::size_t d, const ProbVec& env) {
  BroadcastDims dims{d, env.dim(), env.dim()};
  return ClassicalBroadcastSetup{
      tensor(diag_broadcaster(d), identity_channel(env.dim())), env, dims};
}

// Offspring is forced to basis state 0; parent passes through; trivial env.
ClassicalBroadcastSetup constant_offspring_setup(std::size_t d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d * d),
                                            static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    m(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return ClassicalBroadcastSetup{StochasticChannel(m), ProbVec({1.0}), BroadcastDims{d, 1, 1}};
}

// Parent passes through, offspring receives the environment state.
ClassicalBroadcastSetup env_copy_setup(const ProbVec& env) {
  const std::size_t d = 2, e = 2;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(8, 4);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < e; ++k) {
      m(static_cast<Eigen::Index>((i * d + k) * e + k), static_cast<Eigen::Index>(i * e + k)) = 1.0;
    }
  }
  return ClassicalBroadcastSetup{StochasticChannel(m), env, BroadcastDims{d, e, e}};
}

DensityMatrix qubit_pure(double a0, double a1) {
  Eigen::VectorXcd v(2);
  v << a0, a1;
  v /= v.norm();
  return DensityMatrix(v * v.adjoint());
}

}  // namespace

TEST_CASE("broadcast with the deterministic copier correlates parent and offspring") {
  ProbVec p({0.3, 0.7});
  auto out = broadcast(diag_setup(2, ProbVec({0.6, 0.4})), p);
  CHECK(out.joint.flat()[0] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(out.joint.flat()[1] == doctest::Approx(0.0));
  CHECK(out.joint.flat()[2] == doctest::Approx(0.0));
  CHECK(out.joint.flat()[3] == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(l1_distance(out.parent_marginal, p) <= 1e-12);
  CHECK(l1_distance(out.offspring_marginal, p) <= 1e-12);

  ProbVec wrong({0.2, 0.3, 0.5});
  CHECK_THROWS_AS(broadcast(diag_setup(2, ProbVec({1.0})), wrong), std::invalid_argument);
}

TEST_CASE("broadcast with a constant-offspring channel ignores the parent state") {
  auto setup = constant_offspring_setup(2);
  for (double x : {0.1, 0.5, 0.9}) {
    auto out = broadcast(setup, ProbVec({x, 1.0 - x}));
    CHECK(out.offspring_marginal[0] == doctest::Approx(1.0));
    CHECK(out.parent_marginal[0] == doctest::Approx(x));
  }
}

TEST_CASE("broadcast marginals agree with the marginal oracle") {
  Rng rng(51);
  for (int t = 0; t < 25; ++t) {
    BroadcastDims dims{2, 2, 2};
    ClassicalBroadcastSetup setup{random_channel(dims.in_total(), dims.out_total(), rng),
                                  random_state(2, rng), dims};
    ProbVec p = random_state(2, rng);
    auto out = broadcast(setup, p);

    // Re-derive both marginals of the joint by exhaustive summation.
    auto par = oracle::marginal2(out.joint.flat().weights(), 2, 2, 0);
    auto off = oracle::marginal2(out.joint.flat().weights(), 2, 2, 1);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(out.parent_marginal[i] == doctest::Approx(par[i]).epsilon(1e-12));
      CHECK(out.offspring_marginal[i] == doctest::Approx(off[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("quantum broadcast with the commuting copier") {
  std::vector<DensityMatrix> family{diag_embed(ProbVec({0.5, 0.5})),
                                    diag_embed(ProbVec({0.8, 0.2}))};
  KrausChannel copier = commuting_broadcaster(family);
  QuantumBroadcastSetup setup{copier, DensityMatrix(ComplexMatrix::Identity(1, 1)),
                              BroadcastDims{2, 1, 1}};
  for (const auto& rho : family) {
    auto out = broadcast(setup, rho);
    CHECK(uhlmann_fidelity(out.parent_marginal, rho) >= 1.0 - 1e-9);
    CHECK(uhlmann_fidelity(out.offspring_marginal, rho) >= 1.0 - 1e-9);
  }
}

TEST_CASE("deterministic copier examples") {
  StochasticChannel d2 = diag_broadcaster(2);
  ProbVec out0 = apply_channel(d2, ProbVec({1.0, 0.0}));
  CHECK(out0.weights() == std::vector<double>{1.0, 0.0, 0.0, 0.0});
  ProbVec outu = apply_channel(d2, ProbVec({0.5, 0.5}));
  CHECK(outu.weights() == std::vector<double>{0.5, 0.0, 0.0, 0.5});

  // (P|P') = (p|p') exactly for copied outputs.
  Rng rng(52);
  for (int t = 0; t < 100; ++t) {
    std::size_t dim = 2 + t % 3;
    StochasticChannel dd = diag_broadcaster(dim);
    ProbVec p = random_state(dim, rng), q = random_state(dim, rng);
    double lhs = bhattacharyya(apply_channel(dd, p), apply_channel(dd, q));
    CHECK(std::abs(lhs - bhattacharyya(p, q)) <= tol::broadcaster_identity);
  }
}

TEST_CASE("copying verdicts: disjoint states clone, others cannot") {
  auto setup = diag_setup(2, ProbVec({1.0}));

  CloneVerdict disjoint =
      verify_wigner_clone(setup, ProbVec({1.0, 0.0}), ProbVec({0.0, 1.0}), 1e-9);
  CHECK(disjoint.both_cloned());
  CHECK(disjoint.overlap == doctest::Approx(0.0));
  CHECK(disjoint.dichotomy_ok);
  CHECK(disjoint.chain_holds);

  CloneVerdict mixed =
      verify_wigner_clone(setup, ProbVec({0.5, 0.5}), ProbVec({1.0, 0.0}), 1e-6);
  CHECK_FALSE(mixed.first_cloned);   // the copier correlates, it cannot clone
  CHECK(mixed.second_cloned);
  CHECK(mixed.first_residual == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mixed.dichotomy_ok);  // vacuous: only one state cloned

  // Identity-on-system channel: offspring is the fixed environment state.
  BroadcastDims dims{2, 2, 1};
  ClassicalBroadcastSetup ident{identity_channel(4), ProbVec({1.0, 0.0}), dims};
  CloneVerdict same = verify_wigner_clone(ident, ProbVec({1.0, 0.0}), ProbVec({0.5, 0.5}), 1e-9);
  CHECK(same.first_cloned);        // equals the fixed state
  CHECK_FALSE(same.second_cloned);
}

TEST_CASE("overlap inequality chain for replication steps") {
  // Copier: joint overlap equals input overlap exactly.
  auto setup = diag_setup(2, ProbVec({1.0}));
  BroadcastInequalityVerdict v =
      verify_broadcast_inequalities(setup, ProbVec({0.5, 0.5}), setup, ProbVec({0.7, 0.3}));
  CHECK(v.env_shared);
  CHECK(v.parent_preserved);
  CHECK(v.all_pass);
  CHECK(v.joint_overlap == doctest::Approx(v.input_overlap).epsilon(1e-14));
  REQUIRE(v.joint_eq_input.has_value());
  CHECK(v.joint_eq_input->pass);

  // Constant offspring: offspring overlap is 1, above any input overlap.
  auto constant = constant_offspring_setup(2);
  BroadcastInequalityVerdict c =
      verify_broadcast_inequalities(constant, ProbVec({0.2, 0.8}), constant, ProbVec({0.9, 0.1}));
  CHECK(c.offspring_overlap == doctest::Approx(1.0));
  CHECK(c.all_pass);

  // Random setups with a shared environment: the whole chain holds.
  Rng rng(53);
  for (int t = 0; t < 500; ++t) {
    BroadcastDims dims{2, 2, 2};
    ClassicalBroadcastSetup s{random_channel(dims.in_total(), dims.out_total(), rng),
                              random_state(2, rng), dims};
    BroadcastInequalityVerdict r =
        verify_broadcast_inequalities(s, random_state(2, rng), s, random_state(2, rng));
    CHECK(r.env_shared);
    CHECK(r.parent_ge_joint.pass);
    CHECK(r.offspring_ge_joint.pass);
    CHECK(r.joint_ge_input.pass);
  }
}

TEST_CASE("commuting copier construction and rejection") {
  std::vector<DensityMatrix> basis_states{qubit_pure(1, 0), qubit_pure(0, 1)};
  KrausChannel perfect = commuting_broadcaster(basis_states);
  QuantumBroadcastSetup setup{perfect, DensityMatrix(ComplexMatrix::Identity(1, 1)),
                              BroadcastDims{2, 1, 1}};
  for (const auto& rho : basis_states) {
    auto out = broadcast(setup, rho);
    CHECK(uhlmann_fidelity(out.parent_marginal, rho) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(uhlmann_fidelity(out.offspring_marginal, rho) == doctest::Approx(1.0).epsilon(1e-12));
  }

  std::vector<DensityMatrix> non_commuting{qubit_pure(1, 0), qubit_pure(1, 1)};
  CHECK_THROWS_WITH_AS(commuting_broadcaster(non_commuting),
                       doctest::Contains("commutator norm"), std::invalid_argument);
}

TEST_CASE("commuting copier reproduces random commuting qubit families") {
  Rng rng(54);
  for (int t = 0; t < 50; ++t) {
    DensityMatrix rho = random_density(2, rng);
    // A positive polynomial of rho commutes with it.
    ComplexMatrix poly = rho.entries() * rho.entries() +
                         rng.uniform() * rho.entries() +
                         rng.uniform() * ComplexMatrix::Identity(2, 2);
    DensityMatrix sigma(poly / poly.trace().real());
    std::vector<DensityMatrix> family{rho, sigma};
    REQUIRE(commute_check(family));

    KrausChannel copier = commuting_broadcaster(family);
    QuantumBroadcastSetup setup{copier, DensityMatrix(ComplexMatrix::Identity(1, 1)),
                                BroadcastDims{2, 1, 1}};
    for (const auto& state : family) {
      auto out = broadcast(setup, state);
      CHECK(uhlmann_fidelity(out.parent_marginal, state) >= 1.0 - 1e-9);
      CHECK(uhlmann_fidelity(out.offspring_marginal, state) >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("clone search: disjoint targets are perfectly copyable") {
  CloneSearchConfig cfg;
  cfg.restarts = 4;
  cfg.seed = 5;
  std::vector<ProbVec> targets{ProbVec({1.0, 0.0}), ProbVec({0.0, 1.0})};
  CloneSearchResult r = clone_search(targets, ProbVec({1.0}), cfg);
  CHECK(r.objective >= 1.0 - 1e-6);

  // Reproducibility: stored objective matches re-evaluation of the channel.
  double again = clone_objective(std::get<StochasticChannel>(r.best_channel), targets,
                                 ProbVec({1.0}), r.dims);
  CHECK(std::abs(again - r.objective) <= tol::objective_reproducible);

  std::vector<ProbVec> single{ProbVec({0.25, 0.75})};
  CloneSearchResult s = clone_search(single, ProbVec({1.0}), cfg);
  CHECK(s.objective >= 1.0 - 1e-6);
}

TEST_CASE("clone search matches the grid oracle on an uncopyable pair") {
  // Coarser grid than the acceptance run, refined to the same resolution.
  double oracle_value = oracle::clone_grid_oracle({{1.0, 0.0}, {0.5, 0.5}}, 10);
  CHECK(oracle_value == doctest::Approx(0.9726).epsilon(2e-3));

  CloneSearchConfig cfg;
  cfg.restarts = 12;
  cfg.max_evals = 4000;
  cfg.seed = 17;
  std::vector<ProbVec> targets{ProbVec({1.0, 0.0}), ProbVec({0.5, 0.5})};
  CloneSearchResult r = clone_search(targets, ProbVec({1.0}), cfg);

  CHECK(std::abs(r.objective - oracle_value) <= 1e-3);
  CHECK(r.objective <= oracle_value + 1e-9);
  CHECK(r.objective < 1.0 - (1.0 - oracle_value) * 0.5);
  CHECK_FALSE(r.trace.empty());
}

TEST_CASE("quantum clone search smoke test") {
  CloneSearchConfig cfg;
  cfg.restarts = 2;
  cfg.max_evals = 600;
  cfg.seed = 3;
  std::vector<DensityMatrix> targets{qubit_pure(1, 0), qubit_pure(0, 1)};
  DensityMatrix env(ComplexMatrix::Identity(1, 1));
  CloneSearchResult r = clone_search(targets, env, cfg);
  CHECK(r.objective >= 1.0 - 1e-6);  // commuting start is already perfect
  double again =
      clone_objective(std::get<KrausChannel>(r.best_channel), targets, env, r.dims);
  CHECK(std::abs(again - r.objective) <= tol::objective_reproducible);

  std::vector<DensityMatrix> non_qubit{random_density(3, std::uint64_t{1}),
                                       random_density(3, std::uint64_t{2})};
  DensityMatrix env3(ComplexMatrix::Identity(1, 1));
  CHECK_THROWS_AS(clone_search(non_qubit, env3, cfg), std::invalid_argument);
}

TEST_CASE("species dynamics: homogeneous environments make species converge") {
  Rng rng(55);
  BroadcastDims dims{2, 2, 2};
  ClassicalSpeciesScenario scenario{
      {random_state(2, rng), random_state(2, rng), random_state(2, rng)},
      {{random_state(2, rng)}},
      random_channel(dims.in_total(), dims.out_total(), rng),
      dims,
      20};
  SpeciesTrajectory traj = species_simulate(scenario, 99);
  REQUIRE(traj.overlap_matrices.size() == 21);
  for (std::size_t g = 0; g + 1 < traj.overlap_matrices.size(); ++g) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) {
        double now = traj.overlap_matrices[g](static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j));
        double next = traj.overlap_matrices[g + 1](static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(j));
        CHECK(next >= now - 1e-8);
      }
    }
  }
  CHECK(traj.joint_product_overlap.size() == 20);
}

TEST_CASE("species dynamics: identical species stay identical") {
  Rng rng(56);
  BroadcastDims dims{2, 1, 1};
  ProbVec p = random_state(2, rng);
  ClassicalSpeciesScenario scenario{
      {p, p},
      {{ProbVec({1.0})}},
      random_channel(dims.in_total(), dims.out_total(), rng),
      dims,
      10};
  SpeciesTrajectory traj = species_simulate(scenario, 1);
  for (const auto& m : traj.overlap_matrices) {
    CHECK(m(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("species dynamics: distinct environments separate species in one step") {
  // Parent overlap 0.9; offspring receive disjoint environment states.
  ClassicalSpeciesScenario scenario{
      {ProbVec({0.81, 0.19}), ProbVec({1.0, 0.0})},
      {{ProbVec({1.0, 0.0}), ProbVec({0.0, 1.0})}},
      env_copy_setup(ProbVec({1.0, 0.0})).channel,
      BroadcastDims{2, 2, 2},
      1};
  SpeciesTrajectory traj = species_simulate(scenario, 2);
  CHECK(traj.overlap_matrices[0](0, 1) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(traj.overlap_matrices[1](0, 1) <= 1e-9);
}
