#include "tuning.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "errors.hpp"

namespace trisplit {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double delta_tau_prime_of(double sigma, double beta, double nu, double kappa) {
  return 1.0 - 32.0 * nu / beta - 128.0 * nu * nu / (beta * beta) -
         24.0 * nu * sigma / beta - 24.0 * sigma * kappa;
}
} // namespace

DerivedConstants DerivedConstants::with_lojasiewicz(double c_l) const {
  if (!(c_l > 0.0))
    throw InvalidArgumentError("with_lojasiewicz: constant must be positive");
  DerivedConstants out = *this;
  out.loja_constant = c_l;
  out.c10 = out.c8 / (3.0 * (c_l * out.c9) * (c_l * out.c9));
  return out;
}

DerivedConstants derive_constants(const SpectralQuantities &spec, double lipschitz,
                                  const SolverParams &params) {
  if (!(spec.min_eig_aat > 0.0))
    throw NotSurjectiveError("derive_constants: operator is not surjective "
                             "(lambda_min(AA^T) vanishes)");
  if (lipschitz < 0.0)
    throw InvalidArgumentError("derive_constants: Lipschitz constant must be nonnegative");

  const double sigma = params.sigma;
  const double beta = params.beta;
  const double tau = params.tau;
  const double mu = params.mu;
  const double lmin = spec.min_eig_aat;
  const double anorm = spec.operator_norm;
  const double anorm2 = anorm * anorm;

  DerivedConstants c;
  c.ell_plus = lipschitz * std::numbers::sqrt2;
  const double ell = c.ell_plus;
  c.nu = ell / lmin;
  c.delta_tau_prime = delta_tau_prime_of(sigma, beta, c.nu, spec.kappa);

  c.c0 = 4.0 * (1.0 - sigma) / (sigma * sigma * beta * lmin);
  c.c1 = 8.0 * (sigma * tau + ell) * (sigma * tau + ell) / (sigma * beta * lmin);
  c.c2 = tau - 0.5 * (ell + beta * anorm2) - 4.0 * sigma * tau * tau / (beta * lmin) - c.c1;
  c.c3 = 0.5 * (mu - ell) - 8.0 * ell * ell / (sigma * beta * lmin);
  c.c4 = 1.0 / (sigma * beta);

  c.c5 = 2.0 * ell + tau + beta * anorm + 4.0 * (sigma * tau + anorm) * sigma * tau * c.c0 +
         4.0 * c.c1;
  c.c6 = ell + mu;
  c.c7 = 1.0 + 1.0 / (sigma * beta) + (2.0 / sigma - 1.0) * anorm +
         4.0 * (sigma * tau + anorm) * c.c0 * anorm;

  c.c8 = 1.0 / c.min_c234();
  c.c9 = std::max(c.c5, std::max(c.c6, c.c7));
  if (c.min_c234() > 0.0) {
    c.c11 = 2.0 * std::sqrt(3.0 * c.c8) + 3.0 * c.c8 * c.c9;
    c.c12 = (anorm + 2.0 / (sigma * beta)) * c.c11;
  } else {
    c.c11 = kNaN;
    c.c12 = kNaN;
  }

  // gamma_i solve c g^2 - g + ell/2 = 0 with c = i/(beta lambda_min); a real
  // nonzero root exists iff the discriminant 1 - 2 c ell is nonnegative.
  c.gamma1_exists = beta * lmin >= 2.0 * ell;
  c.gamma2_exists = beta * lmin >= 4.0 * ell;
  return c;
}

double beta_lower_bound(double sigma, double kappa, double nu) {
  const double denom = 1.0 - 24.0 * sigma * kappa;
  const double arg = 24.0 + 24.0 * sigma + 9.0 * sigma * sigma - 192.0 * sigma * kappa;
  if (!(denom > 0.0) || !(arg >= 0.0)) return std::numeric_limits<double>::infinity();
  return 4.0 * nu / denom * (4.0 + 3.0 * sigma + std::sqrt(arg));
}

std::optional<std::pair<double, double>> tau_interval(const SpectralQuantities &spec,
                                                      double sigma, double beta, double nu) {
  const double delta = delta_tau_prime_of(sigma, beta, nu, spec.kappa);
  if (!(delta > 0.0)) return std::nullopt;
  const double base = beta * spec.min_eig_aat / (24.0 * sigma);
  const double mid = 1.0 - 16.0 * nu / beta;
  const double lo =
      std::max(0.5 * beta * spec.operator_norm * spec.operator_norm,
               base * (mid - std::sqrt(delta)));
  const double hi = base * (mid + std::sqrt(delta));
  if (!(lo < hi)) return std::nullopt;
  return std::make_pair(lo, hi);
}

SolverParams select_parameters(const SpectralQuantities &spec, double lipschitz,
                               double safety) {
  if (!spec.surjective || !(spec.min_eig_aat > 0.0))
    throw NotSurjectiveError("select_parameters: operator is not surjective");
  if (!(lipschitz > 0.0))
    throw InvalidArgumentError("select_parameters: Lipschitz constant must be positive");
  if (!(safety > 0.0) || !(safety < 1.0))
    throw InvalidArgumentError("select_parameters: safety must lie in (0, 1)");

  const double ell = lipschitz * std::numbers::sqrt2;
  const double nu = ell / spec.min_eig_aat;

  SolverParams p;
  p.sigma = safety / (24.0 * spec.kappa);
  p.beta = (1.0 + safety) * beta_lower_bound(p.sigma, spec.kappa, nu);

  const auto interval = tau_interval(spec, p.sigma, p.beta, nu);
  if (!interval)
    throw EmptyIntervalError("select_parameters: empty tau interval; the discriminant "
                             "should be positive for the chosen (sigma, beta)");
  p.tau = 0.5 * (interval->first + interval->second);

  p.mu = (1.0 + safety) *
         (ell + 16.0 * ell * ell / (p.sigma * p.beta * spec.min_eig_aat));
  return p;
}

AdmissibilityReport validate(const SolverParams &params, const DerivedConstants &constants,
                             const SpectralQuantities &spec) {
  AdmissibilityReport r;
  const double anorm2 = spec.operator_norm * spec.operator_norm;

  r.sigma_in_range = params.sigma > 0.0 && params.sigma <= 1.0;
  r.dual_step_compatible = 2.0 * params.tau >= params.beta * anorm2;
  r.c2_positive = constants.c2 > 0.0;
  r.c3_positive = constants.c3 > 0.0;
  r.c4_positive = constants.c4 > 0.0;
  r.gamma1_exists = constants.gamma1_exists;
  r.gamma2_exists = constants.gamma2_exists;

  r.sufficient_sigma = params.sigma > 0.0 && params.sigma < 1.0 / (24.0 * spec.kappa);
  r.sufficient_beta =
      r.sufficient_sigma &&
      params.beta > beta_lower_bound(params.sigma, spec.kappa, constants.nu);
  r.sufficient_delta_positive = constants.delta_tau_prime > 0.0;
  const auto interval = tau_interval(spec, params.sigma, params.beta, constants.nu);
  r.sufficient_tau = interval && params.tau > interval->first && params.tau < interval->second;
  r.sufficient_mu = params.mu > constants.ell_plus + 16.0 * constants.ell_plus *
                                                     constants.ell_plus /
                                                     (params.sigma * params.beta *
                                                      spec.min_eig_aat);
  return r;
}

} // namespace trisplit
