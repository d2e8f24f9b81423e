#pragma once

#include <optional>

#include "linop.hpp"

namespace trisplit {

/// Algorithm parameters: y-step 1/mu, penalty beta, x-step 1/tau, dual
/// relaxation sigma in (0, 1].
struct SolverParams {
  double mu = 0.0;
  double beta = 0.0;
  double tau = 0.0;
  double sigma = 1.0;
};

/// Every named constant derived from (operator spectrum, Lipschitz constant,
/// parameters). c2..c4 gate the descent inequality, c5..c7 bound the
/// subgradient element, c8..c12 drive the rate machinery.
struct DerivedConstants {
  double ell_plus = 0.0;         // L * sqrt(2)
  double nu = 0.0;               // ell_plus / lambda_min(AA^T)
  double delta_tau_prime = 0.0;  // discriminant of the tau interval
  double c0 = 0.0;               // 4(1-sigma) / (sigma^2 beta lambda_min)
  double c1 = 0.0;               // 8(sigma tau + ell)^2 / (sigma beta lambda_min)
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;               // 1 / (sigma beta)
  double c5 = 0.0;
  double c6 = 0.0;
  double c7 = 0.0;
  double c8 = 0.0;               // 1 / min{c2, c3, c4}
  double c9 = 0.0;               // max{c5, c6, c7}
  double c11 = 0.0;              // 2 sqrt(3 c8) + 3 c8 c9 (NaN when min{c2,c3,c4} <= 0)
  double c12 = 0.0;              // (||A|| + 2/(sigma beta)) c11
  bool gamma1_exists = false;    // beta lambda_min >= 2 ell_plus
  bool gamma2_exists = false;    // beta lambda_min >= 4 ell_plus
  std::optional<double> loja_constant;       // user-supplied C_L
  std::optional<double> c10;                 // c8 / (3 (C_L c9)^2), needs C_L
  std::optional<double> psi_lower_bound_hint; // inf F + inf G + inf H when known

  double min_c234() const { return std::min(c2, std::min(c3, c4)); }

  /// Copy with the Lojasiewicz constant attached (sets c10).
  DerivedConstants with_lojasiewicz(double c_l) const;
};

/// Pass/fail record for the parameter checks. The "admissible" block is what
/// the descent and subgradient theory actually needs; the "sufficient_region" block is
/// the sufficient tuning region, strictly stronger.
struct AdmissibilityReport {
  bool sigma_in_range = false;        // 0 < sigma <= 1
  bool dual_step_compatible = false;  // 2 tau >= beta ||A||^2
  bool c2_positive = false;
  bool c3_positive = false;
  bool c4_positive = false;
  bool gamma1_exists = false;
  bool gamma2_exists = false;

  bool sufficient_sigma = false;  // sigma < 1 / (24 kappa)
  bool sufficient_beta = false;
  bool sufficient_delta_positive = false;
  bool sufficient_tau = false;
  bool sufficient_mu = false;

  bool admissible() const {
    return sigma_in_range && dual_step_compatible && c2_positive && c3_positive && c4_positive;
  }
  bool sufficient_region() const {
    return sufficient_sigma && sufficient_beta && sufficient_delta_positive && sufficient_tau && sufficient_mu;
  }
};

/// Direct substitution of the constant formulas. Constants may come out
/// negative; validation is separate.
DerivedConstants derive_constants(const SpectralQuantities &spec, double lipschitz,
                                  const SolverParams &params);

/// Interior point of the sufficient parameter region: sigma at a `safety`
/// fraction of its bound, beta and mu at (1+safety) times their lower bounds,
/// tau at the midpoint of its interval. Requires a surjective operator and
/// lipschitz > 0.
SolverParams select_parameters(const SpectralQuantities &spec, double lipschitz,
                               double safety = 0.5);

AdmissibilityReport validate(const SolverParams &params, const DerivedConstants &constants,
                             const SpectralQuantities &spec);

/// Lower bound for beta given sigma (right-hand side of the beta condition).
double beta_lower_bound(double sigma, double kappa, double nu);

/// Admissible open interval for tau at fixed (sigma, beta); empty optional
/// when the discriminant is nonpositive.
std::optional<std::pair<double, double>> tau_interval(const SpectralQuantities &spec,
                                                      double sigma, double beta, double nu);

} // namespace trisplit
