#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "selfrep/quantum.hpp"
#include "selfrep/tolerances.hpp"

using namespace selfrep;
using Complex = std::complex<double>;

namespace {

DensityMatrix pure(const Eigen::VectorXcd& v) {
  Eigen::VectorXcd u = v / v.norm();
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix ket0() {
  Eigen::VectorXcd v(2);
  v << 1, 0;
  return pure(v);
}

DensityMatrix ket1() {
  Eigen::VectorXcd v(2);
  v << 0, 1;
  return pure(v);
}

DensityMatrix ket_plus() {
  Eigen::VectorXcd v(2);
  v << 1, 1;
  return pure(v);
}

}  // namespace

TEST_CASE("DensityMatrix construction invariants") {
  ComplexMatrix not_herm(2, 2);
  not_herm << Complex(0.5, 0), Complex(0.1, 0.2), Complex(0.1, 0.2), Complex(0.5, 0);
  CHECK_THROWS_AS((DensityMatrix(not_herm)), std::invalid_argument);

  ComplexMatrix bad_trace = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS((DensityMatrix(bad_trace)), std::invalid_argument);

  ComplexMatrix neg(2, 2);
  neg << 1.1, 0, 0, -0.1;
  CHECK_THROWS_AS((DensityMatrix(neg)), std::invalid_argument);

  // Eigenvalue dust within -1e-9 is clamped.
  ComplexMatrix dusty(2, 2);
  dusty << 1.0 + 5e-10, 0, 0, -5e-10;
  DensityMatrix fixed((dusty));
  auto ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(fixed.entries()).eigenvalues();
  CHECK(ev.minCoeff() >= 0.0);
  CHECK(fixed.entries().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fidelity examples") {
  Rng rng(21);
  DensityMatrix rho = random_density(3, rng);
  CHECK(uhlmann_fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(uhlmann_fidelity(ket0(), ket1()) == doctest::Approx(0.0).epsilon(1e-9));
  // Pure states: fidelity reduces to |<a|b>|, checked by the inner-product oracle.
  Eigen::VectorXcd a(2), b(2);
  a << 1, 0;
  b << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK(uhlmann_fidelity(ket0(), ket_plus()) ==
        doctest::Approx(oracle::pure_overlap(a, b)).epsilon(1e-12));
  CHECK(uhlmann_fidelity(ket0(), ket_plus()) ==
        doctest::Approx(0.7071067811865476).epsilon(1e-12));

  CHECK_THROWS_AS(uhlmann_fidelity(rho, ket0()), std::invalid_argument);
}

TEST_CASE("fidelity against the inner-product oracle on random pure pairs") {
  Rng rng(22);
  for (int t = 0; t < 40; ++t) {
    Eigen::VectorXcd a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a(i) = Complex(rng.normal(), rng.normal());
      b(i) = Complex(rng.normal(), rng.normal());
    }
    a /= a.norm();
    b /= b.norm();
    CHECK(uhlmann_fidelity(pure(a), pure(b)) ==
          doctest::Approx(oracle::pure_overlap(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("diag_embed bridges the classical backend") {
  DensityMatrix d = diag_embed(ProbVec({1.0, 0.0}));
  CHECK(trace_distance(d, ket0()) <= 1e-12);

  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    ProbVec p = random_state(3, rng), q = random_state(3, rng);
    double f = uhlmann_fidelity(diag_embed(p), diag_embed(q));
    CHECK(std::abs(f - bhattacharyya(p, q)) <= tol::cross_backend);
  }

  // Spectrum (and so entropy of eigenvalues) is preserved under any unitary.
  ProbVec p({0.6, 0.3, 0.1});
  ComplexMatrix u(3, 3);
  u << Complex(0, 1) / std::sqrt(2.0), Complex(1, 0) / std::sqrt(2.0), 0,
      Complex(-1, 0) / std::sqrt(2.0), Complex(0, -1) / std::sqrt(2.0), 0, 0, 0, 1;
  DensityMatrix rotated = diag_embed(p, u);
  auto ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(rotated.entries()).eigenvalues();
  std::vector<double> sorted{0.1, 0.3, 0.6};
  for (int i = 0; i < 3; ++i) CHECK(ev(i) == doctest::Approx(sorted[static_cast<std::size_t>(i)]).epsilon(1e-12));

  ComplexMatrix not_unitary = 2.0 * ComplexMatrix::Identity(3, 3);
  CHECK_THROWS_AS(diag_embed(p, not_unitary), std::invalid_argument);
}

TEST_CASE("partial trace examples") {
  Rng rng(24);
  DensityMatrix rho = random_density(2, rng), sigma = random_density(3, rng);
  DensityMatrix prod = tensor(rho, sigma);
  std::vector<std::size_t> dims{2, 3};
  CHECK(trace_distance(partial_trace(prod, dims, 0), rho) <= 1e-12);
  CHECK(trace_distance(partial_trace(prod, dims, 1), sigma) <= 1e-12);

  // Maximally correlated diagonal state: both marginals are I/2.
  ComplexMatrix corr = ComplexMatrix::Zero(4, 4);
  corr(0, 0) = 0.5;
  corr(3, 3) = 0.5;
  DensityMatrix corr_state((corr));
  std::vector<std::size_t> dims22{2, 2};
  DensityMatrix half_id(0.5 * ComplexMatrix::Identity(2, 2));
  CHECK(trace_distance(partial_trace(corr_state, dims22, 0), half_id) <= 1e-12);
  CHECK(trace_distance(partial_trace(corr_state, dims22, 1), half_id) <= 1e-12);

  std::vector<std::size_t> wrong{2, 2};
  CHECK_THROWS_AS(partial_trace(prod, wrong, 0), std::invalid_argument);
}

TEST_CASE("partial trace matches the quadruple-loop oracle") {
  Rng rng(25);
  for (int t = 0; t < 20; ++t) {
    DensityMatrix rho = random_density(6, rng);
    std::vector<std::size_t> dims{2, 3};
    for (std::size_t keep : {0u, 1u}) {
      Eigen::MatrixXcd expect = oracle::ptrace2(rho.entries(), 2, 3, keep);
      DensityMatrix got = partial_trace(rho, dims, keep);
      CHECK((got.entries() - expect).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("kraus channels") {
  Rng rng(26);
  DensityMatrix rho = random_density(2, rng);
  CHECK(trace_distance(apply_kraus(identity_kraus(2), rho), rho) <= 1e-12);

  // Completely depolarizing channel built from the normalized matrix basis.
  std::vector<ComplexMatrix> ops;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(2, 2);
      e(i, j) = 1.0 / std::sqrt(2.0);
      ops.push_back(e);
    }
  }
  KrausChannel depolarize(ops);
  DensityMatrix out = apply_kraus(depolarize, rho);
  DensityMatrix half_id(0.5 * ComplexMatrix::Identity(2, 2));
  CHECK(trace_distance(out, half_id) <= 1e-12);

  // Random channels preserve the trace.
  for (int t = 0; t < 100; ++t) {
    KrausChannel ch = random_cptp(3, 3, 2, rng);
    DensityMatrix in = random_density(3, rng);
    DensityMatrix mapped = apply_kraus(ch, in);
    CHECK(std::abs(mapped.entries().trace().real() - 1.0) <= 1e-10);
  }

  // Completeness violation is rejected.
  std::vector<ComplexMatrix> bad{0.5 * ComplexMatrix::Identity(2, 2)};
  CHECK_THROWS_AS((KrausChannel(bad)), std::invalid_argument);
  CHECK_THROWS_AS(apply_kraus(identity_kraus(3), rho), std::invalid_argument);
}

TEST_CASE("commutation checks") {
  std::vector<DensityMatrix> diag_pair{diag_embed(ProbVec({0.5, 0.5})),
                                       diag_embed(ProbVec({0.8, 0.2}))};
  CHECK(commute_check(diag_pair));

  // Direct 2x2 computation gives commutator spectral norm 1/2 here.
  std::vector<DensityMatrix> basis_plus{ket0(), ket_plus()};
  CHECK(commutator_norm(basis_plus[0], basis_plus[1]) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(commute_check(basis_plus));

  // Polynomials of a state commute with it.
  Rng rng(27);
  for (int t = 0; t < 20; ++t) {
    DensityMatrix rho = random_density(3, rng);
    ComplexMatrix sq = rho.entries() * rho.entries();
    DensityMatrix rho2(sq / sq.trace().real());
    std::vector<DensityMatrix> family{rho, rho2};
    CHECK(commute_check(family));
  }
}

TEST_CASE("simultaneous diagonalization") {
  // Two diagonal matrices: identity basis works and the diagonals come back.
  std::vector<DensityMatrix> diag_pair{diag_embed(ProbVec({0.5, 0.5})),
                                       diag_embed(ProbVec({0.8, 0.2}))};
  auto sd = simultaneous_diagonalization(diag_pair);
  CHECK(sd.distributions.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    DensityMatrix recon = diag_embed(sd.distributions[i], sd.basis);
    CHECK(trace_distance(recon, diag_pair[i]) <= tol::simdiag_reconstruction);
  }

  // A commuting family with shared degenerate structure.
  Rng rng(28);
  for (int t = 0; t < 20; ++t) {
    DensityMatrix rho = random_density(4, rng);
    ComplexMatrix sq = rho.entries() * rho.entries();
    DensityMatrix rho2(sq / sq.trace().real());
    std::vector<DensityMatrix> family{rho, rho2};
    auto r = simultaneous_diagonalization(family);
    for (std::size_t i = 0; i < family.size(); ++i) {
      DensityMatrix recon = diag_embed(r.distributions[i], r.basis);
      CHECK(trace_distance(recon, family[i]) <= tol::simdiag_reconstruction);
    }
  }

  std::vector<DensityMatrix> non_commuting{ket0(), ket_plus()};
  CHECK_THROWS_WITH_AS(simultaneous_diagonalization(non_commuting),
                       doctest::Contains("commutator norm"), std::invalid_argument);
}

TEST_CASE("samplers are deterministic and valid") {
  DensityMatrix a = random_density(3, std::uint64_t{5});
  DensityMatrix b = random_density(3, std::uint64_t{5});
  CHECK(a.entries() == b.entries());

  KrausChannel ca = random_cptp(2, 2, 2, std::uint64_t{6});
  KrausChannel cb = random_cptp(2, 2, 2, std::uint64_t{6});
  REQUIRE(ca.kraus_ops().size() == cb.kraus_ops().size());
  for (std::size_t i = 0; i < ca.kraus_ops().size(); ++i) {
    CHECK(ca.kraus_ops()[i] == cb.kraus_ops()[i]);
  }

  // 500 sampled channel/state pairs produce valid density matrices.
  Rng rng(29);
  for (int t = 0; t < 500; ++t) {
    KrausChannel ch = random_cptp(2, 3, 2, rng);
    DensityMatrix rho = random_density(2, rng);
    CHECK_NOTHROW(apply_kraus(ch, rho));
  }
}

TEST_CASE("axiom analogues for the quantum overlap") {
  Rng rng(30);
  for (int t = 0; t < 100; ++t) {
    DensityMatrix r1 = random_density(2, rng), r2 = random_density(2, rng);
    DensityMatrix s1 = random_density(3, rng), s2 = random_density(3, rng);

    double f = uhlmann_fidelity(r1, r2);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(std::abs(uhlmann_fidelity(r1, r2) - uhlmann_fidelity(r2, r1)) <=
          tol::fidelity_symmetry);

    // Multiplicativity on tensor products.
    double joint = uhlmann_fidelity(tensor(r1, s1), tensor(r2, s2));
    CHECK(std::abs(joint - f * uhlmann_fidelity(s1, s2)) <= tol::a2);

    // Monotonicity under sampled channels.
    KrausChannel ch = random_cptp(2, 2, 2, rng);
    CHECK(uhlmann_fidelity(apply_kraus(ch, r1), apply_kraus(ch, r2)) >= f - tol::a3);

    // Marginal fidelity dominates joint fidelity.
    DensityMatrix j1 = random_density(6, rng), j2 = random_density(6, rng);
    std::vector<std::size_t> dims{2, 3};
    double joint_f = uhlmann_fidelity(j1, j2);
    for (std::size_t k : {0u, 1u}) {
      CHECK(uhlmann_fidelity(partial_trace(j1, dims, k), partial_trace(j2, dims, k)) >=
            joint_f - tol::a4);
    }
  }
}

TEST_CASE("unitary channels preserve the overlap exactly") {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    // A one-operator CPTP channel is unitary.
    KrausChannel u = random_cptp(3, 3, 1, rng);
    DensityMatrix a = random_density(3, rng), b = random_density(3, rng);
    double before = uhlmann_fidelity(a, b);
    double after = uhlmann_fidelity(apply_kraus(u, a), apply_kraus(u, b));
    CHECK(std::abs(after - before) <= 1e-9);
  }
}
