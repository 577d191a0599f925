#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bq/errors.hpp"
#include "bq/functionals.hpp"

namespace bq::functionals {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void validate(const GirardParams& p) {
  if (!(p.circle_length > 0.0)) throw DomainError("girard: circle length must be > 0");
  if (p.n_max < 1) throw DomainError("girard: n_max must be >= 1");
  if (!(p.beta > 0.0)) throw DomainError("girard: beta must be > 0");
  if (!(p.rho_bar > 0.0)) throw DomainError("girard: rho_bar must be > 0");
}

// Fourier coefficients c_j = (1/L) integral (exp(i f) - 1) exp(-i q_j x) dx,
// j = -2 n_max .. 2 n_max, stored at offset j + 2 n_max.
std::vector<cplx> fourier_coefficients(const TestFunction& f, const GirardParams& p) {
  const double len = p.circle_length;
  const int jmax = 2 * p.n_max;
  std::vector<cplx> c(2 * jmax + 1, 0.0);
  if (f.is_zero()) return c;
  if (f.dim() != 1) throw DomainError("girard: test function must be one-dimensional");

  if (f.indicator_only()) {
    // Exact integration cell by cell; f is constant on each cell.
    std::vector<double> cuts{0.0, len};
    for (double b : f.breakpoints(0)) {
      if (b > 0.0 && b < len) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      const double mid = 0.5 * (a + b);
      const double v = f(std::span<const double>(&mid, 1));
      const double s = std::sin(0.5 * v);
      const cplx g(-2.0 * s * s, std::sin(v));
      if (g == cplx(0.0)) continue;
      for (int j = -jmax; j <= jmax; ++j) {
        if (j == 0) {
          c[j + jmax] += g * (b - a) / len;
          continue;
        }
        const double q = kTwoPi * j / len;
        const cplx seg = (std::polar(1.0, -q * a) - std::polar(1.0, -q * b)) / cplx(0.0, q);
        c[j + jmax] += g * seg / len;
      }
    }
    return c;
  }

  // Trapezoid rule on the periodic grid; exact for band-limited integrands.
  const int grid = std::max(16 * p.n_max, 256);
  std::vector<cplx> g(grid);
  for (int m = 0; m < grid; ++m) {
    const double x = len * m / grid;
    const double v = f(std::span<const double>(&x, 1));
    const double s = std::sin(0.5 * v);
    g[m] = cplx(-2.0 * s * s, std::sin(v));
  }
  for (int j = -jmax; j <= jmax; ++j) {
    cplx sum = 0.0;
    for (int m = 0; m < grid; ++m) sum += g[m] * std::polar(1.0, -kTwoPi * j * m / grid);
    c[j + jmax] = sum / static_cast<double>(grid);
  }
  return c;
}

}  // namespace

double girard_chemical_potential(const GirardParams& p) {
  validate(p);
  return -std::log1p(1.0 / (p.rho_bar * p.circle_length)) / p.beta;
}

Eigen::VectorXd girard_occupations(const GirardParams& p) {
  const double mu = girard_chemical_potential(p);
  const int size = 2 * p.n_max + 1;
  Eigen::VectorXd occ(size);
  for (int i = 0; i < size; ++i) {
    const double k = kTwoPi * (i - p.n_max) / p.circle_length;
    occ(i) = 1.0 / std::expm1(p.beta * (k * k - mu));
  }
  return occ;
}

Eigen::MatrixXcd girard_mode_matrix(const TestFunction& f, const GirardParams& p) {
  validate(p);
  const auto c = fourier_coefficients(f, p);
  const int size = 2 * p.n_max + 1;
  const int jmax = 2 * p.n_max;
  Eigen::MatrixXcd a(size, size);
  for (int r = 0; r < size; ++r) {
    for (int s = 0; s < size; ++s) a(r, s) = c[(r - s) + jmax];
  }
  return a;
}

cplx girard_functional(const TestFunction& f, const GirardParams& p) {
  const Eigen::MatrixXcd a = girard_mode_matrix(f, p);
  const Eigen::VectorXd occ = girard_occupations(p);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  if (p.ordering == GirardOrdering::AThenOccupation) {
    m -= a * occ.cast<cplx>().asDiagonal();
  } else {
    m -= occ.cast<cplx>().asDiagonal() * a;
  }
  return inverse_determinant(m);
}

cplx inverse_determinant(const Eigen::MatrixXcd& m) {
  const Eigen::Index size = m.rows();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const auto& packed = lu.matrixLU();
  double largest = 0.0, smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < size; ++i) {
    largest = std::max(largest, std::abs(packed(i, i)));
    smallest = std::min(smallest, std::abs(packed(i, i)));
  }
  const cplx det = lu.determinant();
  if (!(smallest > 1e-14 * largest) || det == cplx(0.0) || !std::isfinite(std::abs(det))) {
    throw SingularMatrixError("girard: I - A n is singular (pole of the functional)");
  }
  return 1.0 / det;
}

}  // namespace bq::functionals
