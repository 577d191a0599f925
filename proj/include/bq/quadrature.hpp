#pragma once

// Quadrature building blocks: Gauss rules from the Golub-Welsch eigenproblem
// and a globally adaptive Gauss-Kronrod (7/15) integrator for real or complex
// integrands.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "bq/errors.hpp"

namespace bq::quad {

template <typename Scalar>
struct Rule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  Eigen::Index size() const { return nodes.size(); }
};

namespace detail {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 * (first eigenvector component)^2.
template <typename Scalar>
Rule<Scalar> golub_welsch(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& offdiag,
                          Scalar mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Golub-Welsch eigenproblem did not converge");
  }
  Rule<Scalar> rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = mu0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1].
template <typename Scalar = double>
Rule<Scalar> gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) {
    const Scalar kk = static_cast<Scalar>(k);
    off(k - 1) = kk / std::sqrt(Scalar(4) * kk * kk - Scalar(1));
  }
  auto rule = detail::golub_welsch<Scalar>(diag, off, Scalar(2));
  // Newton polish on P_n keeps nodes and weights at full precision.
  for (int i = 0; i < n; ++i) {
    Scalar x = rule.nodes(i);
    Scalar dp = 1;
    for (int it = 0; it < 3; ++it) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      x -= p1 / dp;
    }
    rule.nodes(i) = x;
    rule.weights(i) = Scalar(2) / ((1 - x * x) * dp * dp);
  }
  return rule;
}

/// n-point Gauss-Hermite rule for weight exp(-x^2) on the real line.
template <typename Scalar = double>
Rule<Scalar> gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: n must be positive");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<Scalar>(k) / 2);
  return detail::golub_welsch<Scalar>(diag, off, std::sqrt(std::numbers::pi_v<Scalar>));
}

/// n-point Gauss-Laguerre rule for weight exp(-x) on [0, inf).
template <typename Scalar = double>
Rule<Scalar> gauss_laguerre(int n) {
  if (n < 1) throw DomainError("gauss_laguerre: n must be positive");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag(n);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = static_cast<Scalar>(2 * k + 1);
  for (int k = 1; k < n; ++k) off(k - 1) = static_cast<Scalar>(k);
  return detail::golub_welsch<Scalar>(diag, off, Scalar(1));
}

/// Composite Gauss-Legendre rule with `panels` equal panels on [a, b].
template <typename Scalar = double>
Rule<Scalar> composite_legendre(Scalar a, Scalar b, int panels, int points_per_panel) {
  const auto base = gauss_legendre<Scalar>(points_per_panel);
  Rule<Scalar> rule;
  rule.nodes.resize(panels * points_per_panel);
  rule.weights.resize(panels * points_per_panel);
  const Scalar h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const Scalar mid = a + (p + Scalar(0.5)) * h;
    for (int i = 0; i < points_per_panel; ++i) {
      rule.nodes(p * points_per_panel + i) = mid + Scalar(0.5) * h * base.nodes(i);
      rule.weights(p * points_per_panel + i) = Scalar(0.5) * h * base.weights(i);
    }
  }
  return rule;
}

template <typename T>
struct Result {
  T value{};
  double error = 0;
  bool converged = false;
  std::size_t evaluations = 0;
};

struct Tolerance {
  double absolute = 1e-12;
  double relative = 1e-12;
  std::size_t max_intervals = 4000;
};

namespace detail {

// Kronrod 15-point abscissae/weights and embedded Gauss 7-point weights.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T, typename F>
std::pair<T, double> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T f1 = f(c - dx);
    const T f2 = f(c + dx);
    kron += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  return {kron * h, std::abs(static_cast<T>((kron - gauss) * h))};
}

struct Interval {
  double a, b, error;
  std::size_t slot;
  bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace detail

/// Globally adaptive G7/K15 integration of f over the finite interval [a, b].
/// T may be double or std::complex<double>.
template <typename T = double, typename F>
Result<T> integrate(F&& f, double a, double b, Tolerance tol = {}) {
  Result<T> out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::vector<T> values;
  std::priority_queue<detail::Interval> heap;
  auto [v0, e0] = detail::gk15<T>(f, a, b);
  values.push_back(v0);
  heap.push({a, b, e0, 0});
  T total = v0;
  double error = e0;
  out.evaluations = 15;
  while (error > std::max(tol.absolute, tol.relative * std::abs(total))) {
    if (heap.size() >= tol.max_intervals) break;
    const auto top = heap.top();
    heap.pop();
    const double mid = 0.5 * (top.a + top.b);
    if (!(mid > top.a && mid < top.b)) break;
    auto [vl, el] = detail::gk15<T>(f, top.a, mid);
    auto [vr, er] = detail::gk15<T>(f, mid, top.b);
    out.evaluations += 30;
    total += vl + vr - values[top.slot];
    error += el + er - top.error;
    values[top.slot] = vl;
    heap.push({top.a, mid, el, top.slot});
    values.push_back(vr);
    heap.push({mid, top.b, er, values.size() - 1});
  }
  // Re-sum to shed accumulated update error.
  total = T{};
  error = 0;
  for (const auto& v : values) total += v;
  for (auto h = heap; !h.empty(); h.pop()) error += h.top().error;
  out.value = total;
  out.error = error;
  out.converged = error <= std::max(tol.absolute, tol.relative * std::abs(total));
  return out;
}

/// Adaptive integration over [a, inf) through x = a + s / (1 - s).
template <typename T = double, typename F>
Result<T> integrate_to_infinity(F&& f, double a, Tolerance tol = {}) {
  auto mapped = [&](double s) -> T {
    const double one_minus = 1.0 - s;
    const double x = a + s / one_minus;
    const T v = f(x);
    if (v == T{}) return T{};
    return v / (one_minus * one_minus);
  };
  return integrate<T>(mapped, 0.0, 1.0, tol);
}

/// Same as integrate() but throws NumericalError when the tolerance is missed.
template <typename T = double, typename F>
T integrate_or_throw(F&& f, double a, double b, Tolerance tol, const char* what) {
  auto r = integrate<T>(std::forward<F>(f), a, b, tol);
  if (!r.converged) {
    throw NumericalError(std::string(what) + ": adaptive quadrature did not converge");
  }
  return r.value;
}

}  // namespace bq::quad
