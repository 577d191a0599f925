#include "bq/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bq/errors.hpp"
#include "bq/quadrature.hpp"

namespace bq::functionals {

namespace {

constexpr double kPi = std::numbers::pi;

// exp(i v) - 1 without cancellation for small v.
cplx expm1_i(double v) {
  const double s = std::sin(0.5 * v);
  return {-2.0 * s * s, std::sin(v)};
}

double term_value(const Term& t, std::span<const double> x) {
  switch (t.shape) {
    case Shape::Indicator: {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - t.center[i]) > t.width) return 0.0;
      }
      return t.amplitude;
    }
    case Shape::Gaussian: {
      double r2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - t.center[i]) * (x[i] - t.center[i]);
      return t.amplitude * std::exp(-r2 / (2 * t.width * t.width));
    }
    case Shape::Cosine: {
      double r2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - t.center[i]) * (x[i] - t.center[i]);
      const double r = std::sqrt(r2);
      if (r >= t.width) return 0.0;
      return t.amplitude * 0.5 * (1.0 + std::cos(kPi * r / t.width));
    }
  }
  return 0.0;
}

void require_matching_dim(const TestFunction& f, const Box& box) {
  if (!f.is_zero() && f.dim() != box.dim()) {
    throw DomainError("test function dimension " + std::to_string(f.dim()) + " does not match box dimension " +
                      std::to_string(box.dim()));
  }
}

// Sorted cut points of [0, side] along one axis.
std::vector<double> axis_cuts(const TestFunction& f, const Box& box, int axis) {
  std::vector<double> cuts{0.0, box.side(axis)};
  for (double b : f.breakpoints(axis)) {
    if (b > 0.0 && b < box.side(axis)) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// Piecewise-constant f: sum over the product cells of the cut grid.
cplx cell_sum(const TestFunction& f, const Box& box) {
  const int d = box.dim();
  std::vector<std::vector<double>> cuts(d);
  for (int a = 0; a < d; ++a) cuts[a] = axis_cuts(f, box, a);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> mid(d);
  cplx total = 0.0;
  while (true) {
    double vol = 1.0;
    for (int a = 0; a < d; ++a) {
      mid[a] = 0.5 * (cuts[a][idx[a]] + cuts[a][idx[a] + 1]);
      vol *= cuts[a][idx[a] + 1] - cuts[a][idx[a]];
    }
    total += vol * expm1_i(f(mid));
    int a = d - 1;
    while (a >= 0 && ++idx[a] == cuts[a].size() - 1) idx[a--] = 0;
    if (a < 0) break;
  }
  return total;
}

struct NestedIntegrator {
  const TestFunction& f;
  const Box& box;
  std::vector<std::vector<double>> cuts;
  std::vector<double> x;
  quad::Tolerance tol{1e-14, 1e-12, 2000};

  cplx run(int axis) {
    if (axis == box.dim()) return expm1_i(f(x));
    cplx total = 0.0;
    const auto& c = cuts[axis];
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      auto res = quad::integrate<cplx>(
          [&](double t) {
            x[axis] = t;
            return run(axis + 1);
          },
          c[i], c[i + 1], tol);
      if (!res.converged && res.error > 1e-10 * std::max(1.0, std::abs(res.value))) {
        throw NumericalError("exp_integral: adaptive quadrature did not converge");
      }
      total += res.value;
    }
    return total;
  }
};

}  // namespace

Box::Box(std::vector<double> sides) : sides_(std::move(sides)) {
  if (sides_.empty()) throw DomainError("box needs at least one dimension");
  for (double s : sides_) {
    if (!(s > 0.0 && std::isfinite(s))) throw DomainError("box sides must be positive");
  }
}

double Box::volume() const {
  double v = 1.0;
  for (double s : sides_) v *= s;
  return v;
}

bool Box::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < 0.0 || x[i] > sides_[i]) return false;
  }
  return true;
}

IntensityMeasure::IntensityMeasure(Box b, double r) : box(std::move(b)), rho(r) {
  if (!(rho >= 0.0 && std::isfinite(rho))) throw DomainError("intensity rho must be >= 0");
  if (mass() > specfun::kMittagLefflerDomain) {
    throw DomainError("intensity total mass exceeds 50");
  }
}

TestFunction::TestFunction(std::vector<Term> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!(t.width > 0.0)) throw DomainError("test function term width must be > 0");
    if (t.center.empty() || t.center.size() != terms_.front().center.size()) {
      throw DomainError("test function terms must share one dimension");
    }
    if (!std::isfinite(t.amplitude)) throw DomainError("test function amplitude must be finite");
  }
}

TestFunction TestFunction::indicator(std::vector<double> lo, std::vector<double> hi, double amplitude) {
  if (lo.size() != hi.size() || lo.empty()) throw DomainError("indicator: corner dimensions differ");
  Term t{Shape::Indicator, {}, 0.0, amplitude};
  double half = -1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i])) throw DomainError("indicator: empty interval");
    const double h = 0.5 * (hi[i] - lo[i]);
    if (half >= 0.0 && std::abs(h - half) > 1e-15 * std::max(1.0, h)) {
      throw DomainError("indicator: only cubes are supported");
    }
    half = h;
    t.center.push_back(0.5 * (hi[i] + lo[i]));
  }
  t.width = half;
  return TestFunction({t});
}

double TestFunction::operator()(std::span<const double> x) const {
  double v = 0.0;
  for (const auto& t : terms_) v += term_value(t, x);
  return v;
}

bool TestFunction::indicator_only() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.shape == Shape::Indicator; });
}

int TestFunction::dim() const { return terms_.empty() ? 0 : static_cast<int>(terms_.front().center.size()); }

std::vector<double> TestFunction::breakpoints(int axis) const {
  std::vector<double> out;
  for (const auto& t : terms_) {
    if (t.shape == Shape::Gaussian) continue;
    out.push_back(t.center[axis] - t.width);
    out.push_back(t.center[axis] + t.width);
  }
  return out;
}

double PointConfiguration::pair(const TestFunction& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += f(point(i));
  return s;
}

void validate(const MixingMeasure& xi) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dirac>) {
          if (!(m.rho0 > 0.0)) throw DomainError("Dirac mixing: rho0 must be > 0");
        } else if constexpr (std::is_same_v<T, Exponential>) {
          if (!(m.rho_bar > 0.0)) throw DomainError("exponential mixing: rho_bar must be > 0");
        } else if constexpr (std::is_same_v<T, LogNormal>) {
          if (!(m.sigma > 0.0)) throw DomainError("lognormal mixing: sigma must be > 0");
        } else if constexpr (std::is_same_v<T, Discrete>) {
          if (m.atoms.empty() || m.atoms.size() != m.weights.size()) {
            throw DomainError("discrete mixing: atoms and weights must be non-empty and equal in length");
          }
          double total = 0.0;
          for (std::size_t i = 0; i < m.atoms.size(); ++i) {
            if (!(m.atoms[i] > 0.0) || !(m.weights[i] > 0.0)) {
              throw DomainError("discrete mixing: atoms and weights must be > 0");
            }
            total += m.weights[i];
          }
          if (std::abs(total - 1.0) > 1e-12) throw DomainError("discrete mixing: weights must sum to 1");
        } else {
          specfun::FractionalOrder check(m.alpha);
          (void)check;
        }
      },
      xi);
}

cplx exp_integral(const TestFunction& f, const Box& box) {
  if (f.is_zero()) return 0.0;
  require_matching_dim(f, box);
  if (f.indicator_only()) return cell_sum(f, box);
  NestedIntegrator integ{f, box, {}, std::vector<double>(box.dim(), 0.0)};
  for (int a = 0; a < box.dim(); ++a) integ.cuts.push_back(axis_cuts(f, box, a));
  return integ.run(0);
}

cplx char_poisson(const TestFunction& f, const IntensityMeasure& mu) {
  return std::exp(mu.rho * exp_integral(f, mu.box));
}

cplx char_finite_nv(const TestFunction& f, long long n, const Box& box) {
  if (n < 1) throw DomainError("char_finite_nv: N must be >= 1");
  const cplx w = exp_integral(f, box) / box.volume();
  if (w == cplx(-1.0, 0.0)) return 0.0;
  // log(1 + w) with the modulus taken through log1p.
  const double log_mod = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
  const double arg = std::atan2(w.imag(), 1.0 + w.real());
  return std::exp(static_cast<double>(n) * cplx(log_mod, arg));
}

cplx exp_mixture_closed_form(cplx a, double rho_bar) {
  if (!(rho_bar * a.real() < 1.0)) {
    throw DomainError("exponential mixture diverges unless rho_bar * Re A < 1");
  }
  return 1.0 / (1.0 - rho_bar * a);
}

cplx mixture_transform(cplx a, const MixingMeasure& xi) {
  validate(xi);
  if (const auto* d = std::get_if<Dirac>(&xi)) return std::exp(d->rho0 * a);
  if (const auto* e = std::get_if<Exponential>(&xi)) {
    if (!(e->rho_bar * a.real() < 1.0)) {
      throw DomainError("exponential mixture diverges unless rho_bar * Re A < 1");
    }
    // rho = rho_bar s: integral_0^inf exp(s (rho_bar a - 1)) ds.
    const cplx rate = e->rho_bar * a - 1.0;
    auto res = quad::integrate_to_infinity<cplx>([&](double s) { return std::exp(s * rate); }, 0.0,
                                                 quad::Tolerance{1e-15, 1e-13, 4000});
    if (!res.converged) throw NumericalError("exponential mixture: quadrature did not converge");
    return res.value;
  }
  if (const auto* l = std::get_if<LogNormal>(&xi)) {
    // ln rho ~ Normal(sigma^2, sigma^2).
    static const auto gh = quad::gauss_hermite<double>(64);
    const double s = l->sigma;
    cplx sum = 0.0;
    for (Eigen::Index i = 0; i < gh.size(); ++i) {
      const double rho = std::exp(s * s + std::sqrt(2.0) * s * gh.nodes(i));
      sum += gh.weights(i) * std::exp(rho * a);
    }
    return sum / std::sqrt(kPi);
  }
  if (const auto* d = std::get_if<Discrete>(&xi)) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i < d->atoms.size(); ++i) sum += d->weights[i] * std::exp(d->atoms[i] * a);
    return sum;
  }
  const auto& fr = std::get<FractionalNu>(xi);
  if (fr.alpha == 1.0) return std::exp(a);
  // tau = (W / A(U))^(1 - alpha), U ~ Uniform(0, pi), W ~ Exp(1).
  const double alpha = fr.alpha;
  const quad::Tolerance inner_tol{1e-15, 1e-12, 2000};
  auto inner = [&](double u) {
    const double k = specfun::kanter_a(alpha, u);
    auto res = quad::integrate_to_infinity<cplx>(
        [&](double w) { return std::exp(-w + a * std::pow(w / k, 1.0 - alpha)); }, 0.0, inner_tol);
    if (!res.converged) throw NumericalError("fractional mixture: inner quadrature did not converge");
    return res.value;
  };
  auto outer = quad::integrate<cplx>(inner, 0.0, kPi, quad::Tolerance{1e-14, 1e-11, 2000});
  if (!outer.converged) throw NumericalError("fractional mixture: outer quadrature did not converge");
  return outer.value / kPi;
}

cplx char_compound(const TestFunction& f, const IntensityMeasure& mu_unit, const MixingMeasure& xi) {
  return mixture_transform(mu_unit.rho * exp_integral(f, mu_unit.box), xi);
}

cplx char_fractional(const TestFunction& f, const IntensityMeasure& mu, specfun::FractionalOrder alpha) {
  const cplx arg = mu.rho * exp_integral(f, mu.box);
  if (std::abs(arg) > kFractionalArgumentLimit) {
    throw DomainError("char_fractional: |rho A| exceeds 30");
  }
  return specfun::mittag_leffler(alpha, cplx(std::min(arg.real(), 0.0), arg.imag()));
}

std::vector<double> weights_fractional(specfun::FractionalOrder alpha, double m, int n_max) {
  return specfun::fractional_poisson_weights(alpha, m, n_max);
}

}  // namespace bq::functionals
