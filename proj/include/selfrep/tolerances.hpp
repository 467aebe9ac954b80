// Central numerical tolerance record. Every module reads its thresholds from
// here so that a tolerance is defined exactly once.

#pragma once

namespace selfrep::tol {

// Construction / validation
inline constexpr double construction = 1e-9;   // sums, traces, column sums
inline constexpr double dust = 1e-12;          // negative weights clamped to 0
inline constexpr double hermiticity = 1e-10;   // entrywise |rho - rho^dag|
inline constexpr double eigenvalue_floor = 1e-9;  // eigenvalues below -this are errors
inline constexpr double completeness = 1e-9;   // Frobenius norm of sum K^dag K - I
inline constexpr double unitarity = 1e-9;

// State equality (L1 classically, trace norm for density matrices)
inline constexpr double state_equality = 1e-9;

// Property assertions
inline constexpr double a1 = 1e-9;
inline constexpr double a2_classical = 1e-12;
inline constexpr double a2 = 1e-10;
inline constexpr double a3 = 1e-8;
inline constexpr double a4 = 1e-8;
inline constexpr double entropy_additivity = 1e-10;
inline constexpr double cross_backend = 1e-10;
inline constexpr double fidelity_symmetry = 1e-10;
inline constexpr double commutator = 1e-8;
inline constexpr double simdiag_reconstruction = 1e-8;

// Replication
inline constexpr double marginal_consistency = 1e-10;
inline constexpr double broadcaster_identity = 1e-12;
inline constexpr double parent_preserved = 1e-6;  // modeling error, not float error
inline constexpr double clone_certificate = 1e-6;
inline constexpr double clone_dichotomy = 1e-5;
inline constexpr double objective_reproducible = 1e-9;

// Toy model
inline constexpr double purity = 1e-9;
inline constexpr double membership = 1e-12;
inline constexpr double witness_margin = 1e-12;
inline constexpr double separability_certificate = 1e-6;

}  // namespace selfrep::tol
