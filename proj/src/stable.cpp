#include <algorithm>
#include <cmath>
#include <numbers>

#include "bq/errors.hpp"
#include "bq/quadrature.hpp"
#include "bq/specfun.hpp"

namespace bq::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

// log A(u) written in terms of u_near = min(u, pi - u) so that sin(u) keeps
// full relative precision at both ends of (0, pi).
double log_kanter(double alpha, double u, double sin_u) {
  const double p = 1.0 / (1.0 - alpha);
  return std::log(std::sin((1.0 - alpha) * u)) + alpha * p * std::log(std::sin(alpha * u)) -
         p * std::log(sin_u);
}

// Z(c) = integral_0^pi A(u) exp(-c A(u)) du, split at pi/2. Near u = pi,
// A ~ (pi - u)^(-1/(1-alpha)) and for small c the integrand spikes at
// pi - u ~ c^(1-alpha); that half is integrated in w = -ln(pi - u).
double zolotarev_integral(double alpha, double c) {
  const quad::Tolerance tol{1e-300, 1e-13, 20000};
  auto near_zero = [&](double u) {
    const double log_a = log_kanter(alpha, u, std::sin(u));
    return std::exp(log_a - c * std::exp(log_a));
  };
  auto near_pi = [&](double w) {
    const double v = std::exp(-w);
    const double log_a = log_kanter(alpha, kPi - v, std::sin(v));
    return std::exp(log_a - c * std::exp(log_a) - w);
  };
  const double w_lo = -std::log(kPi / 2);
  const double w_hi = (std::max(-std::log(c), 0.0) + 12.0) * (1.0 - alpha) + 8.0;
  const auto lo = quad::integrate<double>(near_zero, 0.0, kPi / 2, tol);
  const auto hi = quad::integrate<double>(near_pi, w_lo, std::max(w_hi, w_lo + 1.0), tol);
  // The 1e-13 target is a refinement goal; accept anything within 1e-10.
  const double total = lo.value + hi.value;
  if (lo.error + hi.error > 1e-10 * total + 1e-300) {
    throw NumericalError("stable density: Zolotarev integral did not converge");
  }
  return total;
}

void require_stable_order(FractionalOrder alpha) {
  if (alpha.is_poisson()) {
    throw DomainError("alpha = 1 stable law is a point mass; density undefined");
  }
}

}  // namespace

double kanter_a(double alpha, double u) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("kanter_a: alpha must lie in (0, 1)");
  if (!(u > 0.0 && u < kPi)) throw DomainError("kanter_a: u must lie in (0, pi)");
  const double s = u <= kPi / 2 ? std::sin(u) : std::sin(kPi - u);
  return std::exp(log_kanter(alpha, u, s));
}

double stable_density(FractionalOrder alpha, double tau) {
  require_stable_order(alpha);
  if (!(tau > 0.0)) throw DomainError("stable_density: tau must be > 0");
  const double a = alpha.value();
  const double p = 1.0 / (1.0 - a);
  const double c = std::pow(tau, -a * p);
  return a * p * std::pow(tau, -p) * zolotarev_integral(a, c) / kPi;
}

double nu_alpha_density(FractionalOrder alpha, double tau) {
  require_stable_order(alpha);
  if (!(tau > 0.0)) throw DomainError("nu_alpha_density: tau must be > 0");
  const double a = alpha.value();
  const double p = 1.0 / (1.0 - a);
  return std::pow(tau, a * p) * p * zolotarev_integral(a, std::pow(tau, p)) / kPi;
}

double sample_mixing_tau(FractionalOrder alpha, std::mt19937_64& rng) {
  require_stable_order(alpha);
  const double a = alpha.value();
  std::uniform_real_distribution<double> angle(0.0, kPi);
  std::exponential_distribution<double> expo(1.0);
  double u = angle(rng);
  while (u <= 0.0) u = angle(rng);
  const double w = expo(rng);
  // tau = S^(-alpha) with S = (A/W)^((1-alpha)/alpha).
  return std::pow(w / kanter_a(a, u), 1.0 - a);
}

}  // namespace bq::specfun
