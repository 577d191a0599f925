#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "bq/detail/mittag_leffler_impl.hpp"
#include "bq/errors.hpp"
#include "bq/quadrature.hpp"
#include "bq/specfun.hpp"

namespace bq::specfun {

namespace detail {

namespace {

using quad_t = __float128;

// Cancellation budget: binary128 carries ~34 digits, results need ~15.
constexpr double kMaxCancellation = 1e17;
const double kLogMaxCancellation = std::log(kMaxCancellation);

struct QComplex {
  quad_t re = 0, im = 0;
};

inline QComplex mul(QComplex a, QComplex b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline QComplex scale(QComplex a, quad_t s) { return {a.re * s, a.im * s}; }
inline quad_t qabs(QComplex a) { return hypotq(a.re, a.im); }

// Kahan-Neumaier accumulator, one per component.
struct Compensated {
  quad_t sum = 0, comp = 0;
  void add(quad_t v) {
    const quad_t t = sum + v;
    if (fabsq(sum) >= fabsq(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  quad_t value() const { return sum + comp; }
};

// log of the j-th term magnitude of the n-th derivative series at |z| = y.
double log_term(double alpha, int n, int j, double log_y) {
  return std::lgamma(n + j + 1.0) - std::lgamma(j + 1.0) + j * log_y -
         std::lgamma(alpha * (n + j) + 1.0);
}

// log sum_j |term_j|, or +inf once it provably exceeds `cap`.
double log_abs_series(double alpha, int n, double y, double cap) {
  if (y == 0.0) return log_term(alpha, n, 0, 0.0);
  const double log_y = std::log(y);
  double peak = -std::numeric_limits<double>::infinity();
  double acc = 0.0;  // sum exp(l - peak)
  double prev = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < 400000; ++j) {
    const double l = log_term(alpha, n, j, log_y);
    if (l > cap) return std::numeric_limits<double>::infinity();
    if (l > peak) {
      acc = acc * std::exp(peak - l) + 1.0;
      peak = l;
    } else {
      acc += std::exp(l - peak);
    }
    if (l < prev && l < peak - 90.0) return peak + std::log(acc);
    prev = l;
  }
  return std::numeric_limits<double>::infinity();
}

// Conservative estimate of log |E_alpha^(n)(z)| for Re z <= 0, |z| = y.
double log_result_estimate(double alpha, int n, double y, double re_z) {
  if (alpha == 1.0) return re_z;
  const double at_zero = std::lgamma(n + 1.0) - std::lgamma(alpha * n + 1.0);
  if (y == 0.0) return at_zero;
  const double tail = std::lgamma(n + 1.0) - (n + 1.0) * std::log(y) - std::lgamma(1.0 - alpha);
  return std::min(at_zero, tail);
}

double ml_sd(double alpha) {
  // Var(tau) under nu_alpha from E[tau^k] = k! / Gamma(alpha k + 1).
  const double m1 = 1.0 / std::tgamma(alpha + 1.0);
  const double m2 = 2.0 / std::tgamma(2.0 * alpha + 1.0);
  return std::sqrt(std::max(m2 - m1 * m1, 1e-6));
}

double log_nu_tail_shape(double alpha, double tau) {
  const double p = 1.0 / (1.0 - alpha);
  return -kanter_a(alpha, 1e-9) * std::pow(tau, p);
}

// Extent of tau^n exp(-y tau) nu_alpha(tau) beyond which it is negligible.
double moment_extent(double alpha, int n, double y) {
  const double base = nu_alpha_tail(alpha);
  if (n == 0) return base;
  auto phi = [&](double t) { return n * std::log(t) - y * t + log_nu_tail_shape(alpha, t); };
  // Locate the maximiser of phi by golden-section on a bracket growing outward.
  double hi = 1.0;
  while (phi(2 * hi) > phi(hi) && hi < 1e6) hi *= 2;
  double lo = 1e-12, b = 2 * hi;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (b - lo) * 0.381966, m2 = lo + (b - lo) * 0.618034;
    if (phi(m1) < phi(m2)) lo = m1; else b = m2;
  }
  const double t_star = 0.5 * (lo + b);
  const double target = phi(t_star) - 45.0;
  double end = std::max(t_star * 2, 1.0);
  while (phi(end) > target && end < 1e7) end *= 1.5;
  return std::max(base, end);
}

}  // namespace

SeriesResult mittag_leffler_series(double alpha, int n, std::complex<double> z, int max_terms) {
  SeriesResult out;
  const QComplex zq{static_cast<quad_t>(z.real()), static_cast<quad_t>(z.imag())};
  const quad_t a = alpha;
  // term_j = (n+j)!/j! z^j / Gamma(alpha (n+j) + 1)
  quad_t lg_prev = lgammaq(a * n + 1);
  quad_t coef = expq(lgammaq(static_cast<quad_t>(n) + 1) - lg_prev);
  QComplex zpow{1, 0};
  Compensated re, im;
  quad_t abs_sum = 0;
  quad_t prev_mag = -1;
  int j = 0;
  for (; j < max_terms; ++j) {
    const QComplex term = scale(zpow, coef);
    const quad_t mag = fabsq(coef) * qabs(zpow);
    re.add(term.re);
    im.add(term.im);
    abs_sum += mag;
    if (mag == 0 && j > 0) break;
    if (prev_mag >= 0 && mag < prev_mag && mag <= 1e-38Q * abs_sum) break;
    prev_mag = mag;
    const quad_t lg_next = lgammaq(a * (n + j + 1) + 1);
    coef *= static_cast<quad_t>(n + j + 1) / static_cast<quad_t>(j + 1) * expq(lg_prev - lg_next);
    lg_prev = lg_next;
    zpow = mul(zpow, zq);
  }
  out.terms = j + 1;
  out.value = {static_cast<double>(re.value()), static_cast<double>(im.value())};
  out.abs_sum = static_cast<double>(abs_sum);
  const double mag = std::abs(out.value);
  out.accurate = j < max_terms && mag > 0 && out.abs_sum <= kMaxCancellation * mag;
  return out;
}

double nu_alpha_tail(double alpha) {
  const double a0 = kanter_a(alpha, 1e-9);
  return std::pow(60.0 / a0, 1.0 - alpha);
}

NuAlphaGrid::NuAlphaGrid(double alpha, double tau_max, int panels) : alpha_(alpha) {
  const auto rule = quad::composite_legendre<double>(0.0, tau_max, panels, 16);
  nodes_ = rule.nodes;
  weights_.resize(rule.size());
  const FractionalOrder order(alpha);
  for (Eigen::Index i = 0; i < rule.size(); ++i) {
    weights_(i) = rule.weights(i) * nu_alpha_density(order, nodes_(i));
  }
}

NuAlphaGrid NuAlphaGrid::covering(double alpha, double extra_tau) {
  const double tau_max = nu_alpha_tail(alpha) + extra_tau;
  const double h = std::min(0.25, 0.5 * ml_sd(alpha));
  const int panels = std::clamp(static_cast<int>(std::ceil(tau_max / h)), 64, 4000);
  return NuAlphaGrid(alpha, tau_max, panels);
}

double NuAlphaGrid::laplace_moment(int n, double x) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
    const double t = nodes_(i);
    sum += weights_(i) * std::exp(n * std::log(t) + x * t);
  }
  return sum;
}

std::complex<double> NuAlphaGrid::laplace(std::complex<double> z) const {
  std::complex<double> sum = 0.0;
  for (Eigen::Index i = 0; i < nodes_.size(); ++i) sum += weights_(i) * std::exp(z * nodes_(i));
  return sum;
}

double NuAlphaGrid::poisson_mixture(int n, double m) const {
  double sum = 0.0;
  const double lgn = std::lgamma(n + 1.0);
  for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
    const double lambda = m * nodes_(i);
    const double log_p = (n == 0 ? 0.0 : n * std::log(lambda)) - lambda - lgn;
    sum += weights_(i) * std::exp(log_p);
  }
  return sum;
}

namespace {

struct Evaluation {
  std::complex<double> value;
  MittagLefflerPath path;
};

bool series_plausible(double alpha, int n, std::complex<double> z) {
  const double y = std::abs(z);
  const double est = log_result_estimate(alpha, n, y, z.real());
  const double cap = est + kLogMaxCancellation;
  return log_abs_series(alpha, n, y, cap) <= cap;
}

NuAlphaGrid moment_grid(double alpha, int n, double y) {
  const double extent = moment_extent(alpha, n, y);
  const double base = nu_alpha_tail(alpha);
  double h = std::min({0.25, 0.5 * ml_sd(alpha), 4.0 / std::max(y, 1.0)});
  if (n > 0) h = std::min(h, 2.0 * extent / std::sqrt(n + 1.0) / 8.0);
  const double tau_max = std::max(extent, base);
  const int panels = std::clamp(static_cast<int>(std::ceil(tau_max / h)), 64, 4000);
  return NuAlphaGrid(alpha, tau_max, panels);
}

Evaluation evaluate(double alpha, int n, std::complex<double> z) {
  if (series_plausible(alpha, n, z)) {
    const auto s = mittag_leffler_series(alpha, n, z);
    if (s.accurate) return {s.value, MittagLefflerPath::Series};
  }
  if (alpha == 1.0) return {std::exp(z), MittagLefflerPath::Exponential};
  if (z.imag() == 0.0) {
    const auto grid = moment_grid(alpha, n, -z.real());
    return {grid.laplace_moment(n, z.real()), MittagLefflerPath::LaplaceMixture};
  }
  const auto grid = moment_grid(alpha, 0, std::abs(z));
  return {grid.laplace(z), MittagLefflerPath::LaplaceMixture};
}

void check_real_domain(int n, double x) {
  if (!(x <= 0.0 && x >= -kMittagLefflerDomain)) {
    throw DomainError("Mittag-Leffler: x = " + std::to_string(x) + " outside [-50, 0]");
  }
  if (n < 0 || n > kMaxDerivativeOrder) {
    throw DomainError("Mittag-Leffler: derivative order must lie in [0, 200]");
  }
}

}  // namespace
}  // namespace detail

double mittag_leffler(FractionalOrder alpha, double x) { return mittag_leffler_deriv(alpha, 0, x); }

double mittag_leffler_deriv(FractionalOrder alpha, int n, double x) {
  detail::check_real_domain(n, x);
  return detail::evaluate(alpha.value(), n, {x, 0.0}).value.real();
}

std::complex<double> mittag_leffler(FractionalOrder alpha, std::complex<double> z) {
  if (!(z.real() <= 0.0) || !(std::abs(z) <= kMittagLefflerDomain)) {
    throw DomainError("Mittag-Leffler: complex argument needs Re z <= 0 and |z| <= 50");
  }
  return detail::evaluate(alpha.value(), 0, z).value;
}

MittagLefflerPath mittag_leffler_path(FractionalOrder alpha, int n, double abs_x) {
  detail::check_real_domain(n, -abs_x);
  return detail::evaluate(alpha.value(), n, {-abs_x, 0.0}).path;
}

std::vector<double> fractional_poisson_weights(FractionalOrder alpha, double m, int n_max) {
  if (!(m >= 0.0 && m <= kMittagLefflerDomain)) {
    throw DomainError("fractional weights: mass m must lie in [0, 50]");
  }
  if (n_max < 0 || n_max > 10000) throw DomainError("fractional weights: n_max must lie in [0, 10000]");
  std::vector<double> p(n_max + 1, 0.0);
  if (m == 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double a = alpha.value();
  const double log_m = std::log(m);
  if (alpha.is_poisson()) {
    for (int n = 0; n <= n_max; ++n) p[n] = std::exp(n * log_m - m - std::lgamma(n + 1.0));
    return p;
  }
  std::vector<int> deferred;
  for (int n = 0; n <= n_max; ++n) {
    const std::complex<double> z{-m, 0.0};
    if (detail::series_plausible(a, n, z)) {
      const auto s = detail::mittag_leffler_series(a, n, z);
      if (s.accurate) {
        p[n] = s.value.real() * std::exp(n * log_m - std::lgamma(n + 1.0));
        continue;
      }
    }
    deferred.push_back(n);
  }
  if (!deferred.empty()) {
    const auto grid = detail::NuAlphaGrid::covering(a);
    for (int n : deferred) p[n] = grid.poisson_mixture(n, m);
  }
  return p;
}

}  // namespace bq::specfun
