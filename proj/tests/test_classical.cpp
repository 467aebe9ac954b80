#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "selfrep/classical.hpp"
#include "selfrep/tolerances.hpp"

using namespace selfrep;

TEST_CASE("ProbVec construction invariants") {
  CHECK_NOTHROW(ProbVec({0.5, 0.5}));
  CHECK_THROWS_AS(ProbVec({0.7, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVec({1.1, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVec({}), std::invalid_argument);

  // Dust in [-1e-12, 0) is clamped, then the sum renormalized.
  ProbVec dusty({1.0 + 5e-13, -5e-13});
  CHECK(dusty[1] == 0.0);
  CHECK(dusty[0] == doctest::Approx(1.0).epsilon(1e-12));

  // Sum off by more than 1e-9 is an error, within it is renormalized.
  CHECK_THROWS_AS(ProbVec({0.5, 0.5 + 1e-6}), std::invalid_argument);
  ProbVec renorm({0.5, 0.5 + 1e-10});
  double total = renorm[0] + renorm[1];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bhattacharyya examples") {
  CHECK(bhattacharyya(ProbVec({0.5, 0.5}), ProbVec({0.5, 0.5})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bhattacharyya(ProbVec({1.0, 0.0}), ProbVec({0.0, 1.0})) == 0.0);
  // Direct evaluation of the definition: sqrt(0.5 * 1) = 1/sqrt(2).
  CHECK(bhattacharyya(ProbVec({0.5, 0.5}), ProbVec({1.0, 0.0})) ==
        doctest::Approx(0.7071067811865476).epsilon(1e-15));
  CHECK_THROWS_AS(bhattacharyya(ProbVec({1.0}), ProbVec({0.5, 0.5})), std::invalid_argument);
}

TEST_CASE("shannon entropy examples") {
  CHECK(shannon_entropy(ProbVec({1.0, 0.0, 0.0})) == 0.0);
  CHECK(shannon_entropy(ProbVec({0.5, 0.5})) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // A zero weight contributes nothing.
  CHECK(shannon_entropy(ProbVec({0.5, 0.5, 0.0})) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("tensor examples") {
  JointProb a = tensor(ProbVec({1.0, 0.0}), ProbVec({0.0, 1.0}));
  CHECK(a.subsystem_dims() == std::vector<std::size_t>{2, 2});
  CHECK(a.flat().weights() == std::vector<double>{0.0, 1.0, 0.0, 0.0});

  JointProb u = tensor(ProbVec({0.5, 0.5}), ProbVec({0.5, 0.5}));
  for (std::size_t i = 0; i < 4; ++i) CHECK(u.flat()[i] == doctest::Approx(0.25));
}

TEST_CASE("tensor factorizes the overlap") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    ProbVec p = random_state(3, rng), q = random_state(3, rng);
    ProbVec pp = random_state(3, rng), qp = random_state(3, rng);
    double joint = bhattacharyya(tensor(p, q), tensor(pp, qp));
    double product = bhattacharyya(p, pp) * bhattacharyya(q, qp);
    CHECK(std::abs(joint - product) <= tol::a2_classical);
  }
}

TEST_CASE("marginal examples") {
  JointProb prod = tensor(ProbVec({1.0, 0.0}), ProbVec({0.3, 0.7}));
  ProbVec m0 = marginal(prod, 0);
  CHECK(m0[0] == doctest::Approx(1.0));
  CHECK(m0[1] == doctest::Approx(0.0));

  // Correlated copy P(i,j) = p_i delta_ij.
  JointProb corr({0.5, 0.0, 0.0, 0.5}, {2, 2});
  for (std::size_t k : {0u, 1u}) {
    ProbVec m = marginal(corr, k);
    CHECK(m[0] == doctest::Approx(0.5));
    CHECK(m[1] == doctest::Approx(0.5));
  }

  CHECK_THROWS_AS(marginal(corr, 2), std::invalid_argument);
}

TEST_CASE("marginal matches exhaustive summation on random joints") {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    ProbVec flat = random_state(6, rng);
    JointProb joint(flat.weights(), {2, 3});
    for (std::size_t keep : {0u, 1u}) {
      auto expect = oracle::marginal2(flat.weights(), 2, 3, keep);
      ProbVec got = marginal(joint, keep);
      REQUIRE(got.dim() == expect.size());
      for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("three-subsystem marginalize") {
  Rng rng(13);
  ProbVec flat = random_state(12, rng);
  JointProb joint(flat.weights(), {2, 3, 2});
  // Keeping everything returns the joint itself.
  std::vector<std::size_t> all{0, 1, 2};
  JointProb same = marginalize(joint, all);
  for (std::size_t i = 0; i < 12; ++i) CHECK(same.flat()[i] == doctest::Approx(flat[i]));
  // Pairwise marginal agrees with marginalizing in two steps.
  std::vector<std::size_t> first_two{0, 1};
  JointProb m01 = marginalize(joint, first_two);
  CHECK(m01.subsystem_dims() == std::vector<std::size_t>{2, 3});
  ProbVec m1_direct = marginal(joint, 1);
  ProbVec m1_via = marginal(m01, 1);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(m1_via[i] == doctest::Approx(m1_direct[i]).epsilon(1e-14));
  }
}

TEST_CASE("apply_channel examples") {
  Rng rng(14);
  ProbVec p = random_state(3, rng);
  ProbVec same = apply_channel(identity_channel(3), p);
  for (std::size_t i = 0; i < 3; ++i) CHECK(same[i] == doctest::Approx(p[i]));

  Eigen::MatrixXd constant(2, 2);
  constant << 1, 1, 0, 0;
  ProbVec fixed = apply_channel(StochasticChannel(constant), ProbVec({0.3, 0.7}));
  CHECK(fixed[0] == doctest::Approx(1.0));
  CHECK(fixed[1] == doctest::Approx(0.0));

  CHECK_THROWS_AS(apply_channel(identity_channel(2), p), std::invalid_argument);
}

TEST_CASE("apply_channel matches the double-loop oracle") {
  Rng rng(15);
  for (int t = 0; t < 30; ++t) {
    StochasticChannel m = random_channel(3, 4, rng);
    ProbVec p = random_state(3, rng);
    auto expect = oracle::matvec(m, p.weights());
    ProbVec got = apply_channel(m, p);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("stochastic channel construction") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.6, 0.5, 0.6, 0.5;  // first column sums to 1.2
  CHECK_THROWS_AS((StochasticChannel(bad)), std::invalid_argument);

  Eigen::MatrixXd neg(2, 1);
  neg << 1.5, -0.5;
  CHECK_THROWS_AS((StochasticChannel(neg)), std::invalid_argument);
}

TEST_CASE("samplers are deterministic and valid") {
  ProbVec a = random_state(4, std::uint64_t{99});
  ProbVec b = random_state(4, std::uint64_t{99});
  CHECK(a.weights() == b.weights());

  StochasticChannel ca = random_channel(3, 5, std::uint64_t{7});
  StochasticChannel cb = random_channel(3, 5, std::uint64_t{7});
  CHECK(ca.matrix() == cb.matrix());

  // Law of large numbers against the flat Dirichlet mean 1/dim.
  Rng rng(1234);
  double mean = 0.0;
  const int n = 10000;
  for (int t = 0; t < n; ++t) mean += random_state(2, rng)[0];
  mean /= n;
  CHECK(std::abs(mean - 0.5) < 0.02);
}

TEST_CASE("overlap bounds and the equality biconditional") {
  Rng rng(16);
  for (int t = 0; t < 200; ++t) {
    ProbVec p = random_state(3, rng), q = random_state(3, rng);
    double b = bhattacharyya(p, q);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    // Distinct sampled states: overlap strictly below 1.
    if (l1_distance(p, q) >= tol::state_equality) CHECK(b < 1.0);
    CHECK(bhattacharyya(p, p) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // A small rebalanced perturbation keeps the overlap strictly below 1.
  ProbVec p({0.4, 0.6});
  ProbVec q({0.4 + 1e-3, 0.6 - 1e-3});
  CHECK(bhattacharyya(p, q) < 1.0 - 1e-9);
  CHECK(bhattacharyya(p, q) > 0.999);
}

TEST_CASE("channels never reduce the overlap") {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    StochasticChannel m = random_channel(3, 3, rng);
    ProbVec p = random_state(3, rng), q = random_state(3, rng);
    double before = bhattacharyya(p, q);
    double after = bhattacharyya(apply_channel(m, p), apply_channel(m, q));
    CHECK(after >= before - 1e-10);
  }
}

TEST_CASE("marginals overlap at least as much as joints") {
  Rng rng(18);
  for (int t = 0; t < 200; ++t) {
    ProbVec fa = random_state(6, rng), fb = random_state(6, rng);
    JointProb a(fa.weights(), {2, 3}), b(fb.weights(), {2, 3});
    double joint = bhattacharyya(a, b);
    for (std::size_t k : {0u, 1u}) {
      CHECK(bhattacharyya(marginal(a, k), marginal(b, k)) >= joint - 1e-10);
    }
  }
}

TEST_CASE("entropy is additive on products") {
  Rng rng(19);
  for (int t = 0; t < 100; ++t) {
    ProbVec p = random_state(3, rng), q = random_state(4, rng);
    double lhs = shannon_entropy(tensor(p, q));
    double rhs = shannon_entropy(p) + shannon_entropy(q);
    CHECK(std::abs(lhs - rhs) <= tol::entropy_additivity);
  }
}
