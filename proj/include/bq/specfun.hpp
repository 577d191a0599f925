#pragma once

// Scalar special functions: Bose-Einstein polylogarithms g_s, tabulated zeta
// values, the Mittag-Leffler function E_alpha and its derivatives on the
// negative real axis, the one-sided alpha-stable law, and the lognormal
// density with mode at 1.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace bq::specfun {

/// Half-integer polylogarithm orders used by the ideal Bose gas.
enum class PolylogOrder { Half, ThreeHalves, FiveHalves };

constexpr double order_value(PolylogOrder s) {
  switch (s) {
    case PolylogOrder::Half: return 0.5;
    case PolylogOrder::ThreeHalves: return 1.5;
    case PolylogOrder::FiveHalves: return 2.5;
  }
  return 0.0;
}

/// Rejects any order other than 1/2, 3/2, 5/2.
PolylogOrder polylog_order(double s);

/// g_s(z) = sum_{k>=1} z^k / k^s for z in [0, 1].
double polylog(PolylogOrder s, double z);

/// g_s(exp(-mu)) for mu >= 0. Preferred near z = 1 where ln z loses digits.
double polylog_neglog(PolylogOrder s, double mu);

/// Direct power series, intended for z <= 1/2 (exposed for branch checks).
double polylog_series(PolylogOrder s, double z);

/// Expansion about z = 1 in mu = -ln z:
///   Gamma(1-s) mu^(s-1) + sum_{n<30} zeta(s-n) (-mu)^n / n!.
double polylog_robinson(PolylogOrder s, double mu);

/// Riemann zeta from a fixed table (half-integers 5/2 .. -59/2, and 0, 2, 3, 4).
double zeta_const(double s);

/// Fractional order alpha in (0, 1].
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha);
  double value() const { return alpha_; }
  bool is_poisson() const { return alpha_ == 1.0; }

 private:
  double alpha_;
};

/// Largest |x| accepted by the Mittag-Leffler routines.
inline constexpr double kMittagLefflerDomain = 50.0;
inline constexpr int kMaxDerivativeOrder = 200;

/// E_alpha(x) = sum_n x^n / Gamma(alpha n + 1) for -50 <= x <= 0.
double mittag_leffler(FractionalOrder alpha, double x);

/// n-th derivative E_alpha^(n)(x) for -50 <= x <= 0, n <= 200.
double mittag_leffler_deriv(FractionalOrder alpha, int n, double x);

/// E_alpha(z) for complex z with Re z <= 0 and |z| <= 50.
std::complex<double> mittag_leffler(FractionalOrder alpha, std::complex<double> z);

/// Which evaluation path a Mittag-Leffler call took.
enum class MittagLefflerPath { Series, Exponential, LaplaceMixture };

/// Path selection is deterministic in (alpha, n, |x|); exposed for tests.
MittagLefflerPath mittag_leffler_path(FractionalOrder alpha, int n, double abs_x);

/// Weights p_n = E_alpha^(n)(-m) m^n / n!, n = 0..n_max.
std::vector<double> fractional_poisson_weights(FractionalOrder alpha, double m, int n_max);

/// Density of the one-sided alpha-stable law with Laplace transform exp(-t^alpha).
double stable_density(FractionalOrder alpha, double tau);

/// Density of nu_alpha, the law of S^(-alpha) for S one-sided alpha-stable:
///   integral exp(-x tau) nu_alpha(tau) dtau = E_alpha(-x).
double nu_alpha_density(FractionalOrder alpha, double tau);

/// Kanter's function A(u) on (0, pi); S = (A(U)/W)^((1-alpha)/alpha).
double kanter_a(double alpha, double u);

/// Draw tau ~ nu_alpha (alpha < 1) by Kanter's method.
double sample_mixing_tau(FractionalOrder alpha, std::mt19937_64& rng);

/// Lognormal width sigma > 0.
class LogNormalWidth {
 public:
  explicit LogNormalWidth(double sigma);
  double value() const { return sigma_; }

 private:
  double sigma_;
};

/// exp(-(ln x - sigma^2)^2 / (2 sigma^2)) / (x sigma sqrt(2 pi)); mode at x = 1.
double lognormal_pdf(LogNormalWidth width, double x);

}  // namespace bq::specfun
