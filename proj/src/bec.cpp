#include "bq/bec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bq/errors.hpp"
#include "bq/quadrature.hpp"
#include "bq/specfun.hpp"

namespace bq::bec {

namespace {

using specfun::PolylogOrder;

// Averages of x^p g_s(z^x) over nu, with z = exp(-mu).
struct Averages {
  double g12_x = 0.0;  // <x g_{1/2}>
  double g32 = 0.0;    // <g_{3/2}>
  double g32_x = 0.0;  // <x g_{3/2}>
  double g52 = 0.0;    // <g_{5/2}>
};

double average(const Ensemble& ens, PolylogOrder order, double mu, bool times_x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ens.nodes().size(); ++i) {
    const double x = ens.nodes()[i];
    const double g = specfun::polylog_neglog(order, x * mu);
    sum += ens.weights()[i] * (times_x ? x * g : g);
  }
  return sum;
}

Averages averages(const Ensemble& ens, double mu) {
  Averages a;
  a.g32 = average(ens, PolylogOrder::ThreeHalves, mu, false);
  a.g52 = average(ens, PolylogOrder::FiveHalves, mu, false);
  if (mu > 0.0) {
    a.g32_x = average(ens, PolylogOrder::ThreeHalves, mu, true);
    a.g12_x = average(ens, PolylogOrder::Half, mu, true);
  }
  return a;
}

void require_positive(double t) {
  if (!(t > 0.0 && std::isfinite(t))) throw DomainError("temperature must be > 0");
}

double weight_sum(const Ensemble& ens) {
  double s = 0.0;
  for (double w : ens.weights()) s += w;
  return s;
}

}  // namespace

Ensemble::Ensemble(std::vector<double> nodes, std::vector<double> weights, double sigma)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), sigma_(sigma) {}

Ensemble Ensemble::dirac() { return Ensemble({1.0}, {1.0}, 0.0); }

Ensemble Ensemble::lognormal(double sigma, int nodes) {
  if (sigma == 0.0) return dirac();
  specfun::LogNormalWidth check(sigma);
  (void)check;
  if (nodes < 2) throw DomainError("lognormal ensemble needs at least 2 nodes");
  const auto gh = quad::gauss_hermite<double>(nodes);
  std::vector<double> x, w;
  for (Eigen::Index i = 0; i < gh.size(); ++i) {
    x.push_back(std::exp(sigma * sigma + std::sqrt(2.0) * sigma * gh.nodes(i)));
    w.push_back(gh.weights(i) / std::sqrt(std::numbers::pi));
  }
  return Ensemble(std::move(x), std::move(w), sigma);
}

Ensemble Ensemble::discrete(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw DomainError("discrete ensemble: atoms and weights must be non-empty and equal in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] > 0.0) || !(weights[i] > 0.0)) throw DomainError("discrete ensemble: entries must be > 0");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("discrete ensemble: weights must sum to 1");
  return Ensemble(std::move(atoms), std::move(weights), 0.0);
}

double critical_temperature(const Ensemble& ens) {
  // At z = 1 every g_{3/2}(z^x) equals zeta(3/2).
  return std::pow(weight_sum(ens) * specfun::zeta_const(1.5), -2.0 / 3.0);
}

std::optional<double> solve_neglog_fugacity(double t, const Ensemble& ens) {
  require_positive(t);
  const double target = std::pow(t, -1.5);
  auto f = [&](double mu) { return average(ens, PolylogOrder::ThreeHalves, mu, false) - target; };
  if (f(kCriticalGuard) <= 0.0) return std::nullopt;  // root below the guard

  double lo = kCriticalGuard, hi = 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("fugacity solver: no bracket");
  }
  // Bisection in log mu, then Newton with the g_{1/2} derivative.
  for (int i = 0; i < 60 && hi / lo > 1.0 + 1e-6; ++i) {
    const double mid = std::sqrt(lo * hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  double mu = std::sqrt(lo * hi);
  for (int i = 0; i < 50; ++i) {
    const double r = f(mu);
    if (std::abs(r) <= 1e-15 * target) break;
    (r > 0.0 ? lo : hi) = mu;
    const double slope = -average(ens, PolylogOrder::Half, mu, true);
    double next = mu - r / slope;
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (next == mu) break;
    mu = next;
  }
  if (std::abs(f(mu)) > 1e-12 * target) throw NumericalError("fugacity solver: residual above 1e-12");
  if (mu < kCriticalGuard) return std::nullopt;
  return mu;
}

std::optional<double> solve_fugacity(double t, const Ensemble& ens) {
  const auto mu = solve_neglog_fugacity(t, ens);
  if (!mu) return std::nullopt;
  return std::exp(-*mu);
}

ThermoPoint thermo_point(double t, const Ensemble& ens) {
  require_positive(t);
  const auto mu = solve_neglog_fugacity(t, ens);
  if (!mu) {
    // z^x = 1 for every x: the condensed branch does not see nu.
    const double g52 = specfun::zeta_const(2.5);
    return {t, 1.0, 1.5 * std::pow(t, 2.5) * g52, 3.75 * std::pow(t, 1.5) * g52};
  }
  const auto a = averages(ens, *mu);
  const double z = std::exp(-*mu);
  const double u = 1.5 * std::pow(t, 2.5) * a.g52;
  // dz/dT from the constraint, with <x g_s(z^x)> / z carrying the chain rule.
  const double dz_dt = -(1.5 / t) * a.g32 / (a.g12_x / z);
  const double cv = 3.75 * std::pow(t, 1.5) * a.g52 + 1.5 * std::pow(t, 2.5) * (a.g32_x / z) * dz_dt;
  return {t, z, u, cv};
}

double internal_energy(double t, const Ensemble& ens) { return thermo_point(t, ens).u; }

double specific_heat(double t, const Ensemble& ens) { return thermo_point(t, ens).cv; }

std::vector<CurveRow> cv_curve(const std::vector<double>& sigmas, const std::vector<double>& t_grid, int nodes) {
  if (t_grid.empty()) throw DomainError("cv_curve: empty temperature grid");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw DomainError("cv_curve: temperature grid must be ascending");
  std::vector<CurveRow> rows;
  rows.reserve(sigmas.size() * t_grid.size());
  for (double sigma : sigmas) {
    if (sigma < 0.0) throw DomainError("cv_curve: sigma must be >= 0");
    const auto ens = Ensemble::lognormal(sigma, nodes);
    for (double t : t_grid) {
      const auto p = thermo_point(t, ens);
      const double h = kFiniteDifferenceStep;
      const double fd = (internal_energy(t + h, ens) - internal_energy(t - h, ens)) / (2.0 * h);
      rows.push_back({sigma, t, p.z, p.u, p.cv, std::abs(fd - p.cv) / std::abs(p.cv)});
    }
  }
  return rows;
}

double sharpness(const std::vector<CurveRow>& rows, double sigma, double t_c) {
  double best = 0.0;
  const CurveRow* prev = nullptr;
  for (const auto& r : rows) {
    if (r.sigma != sigma || !(r.t_star > t_c && r.t_star <= 1.2 * t_c)) continue;
    if (prev) best = std::max(best, std::abs((r.cv - prev->cv) / (r.t_star - prev->t_star)));
    prev = &r;
  }
  return best;
}

std::string curve_csv_header() { return "sigma,T_star,z,u,cv,cv_fd_relerr"; }

}  // namespace bq::bec
