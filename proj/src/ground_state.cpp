#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bq/errors.hpp"
#include "bq/functionals.hpp"

namespace bq::functionals {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate(const GroundStateField& field, const Grid& grid) {
  if (field.n_particles < 1) throw DomainError("ground state: need at least one particle");
  if (grid.points < 5) throw DomainError("ground state: grid needs at least 5 points per dimension");
  if (!(grid.hi > grid.lo)) throw DomainError("ground state: grid interval is empty");
  if (const auto* c = std::get_if<CustomW>(&field.w)) {
    const double expected = std::pow(static_cast<double>(grid.points), field.n_particles);
    if (static_cast<double>(c->values.size()) != expected) {
      throw DomainError("ground state: custom W has " + std::to_string(c->values.size()) +
                        " samples, grid needs " + std::to_string(static_cast<long long>(expected)));
    }
  }
}

long long grid_size(const GroundStateField& field, const Grid& grid) {
  long long total = 1;
  for (int i = 0; i < field.n_particles; ++i) total *= grid.points;
  return total;
}

// Row-major multi-index, last coordinate fastest.
void decode(long long flat, int points, std::vector<int>& idx) {
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % points);
    flat /= points;
  }
}

double min_separation(const std::vector<double>& x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) best = std::min(best, std::abs(x[i] - x[j]));
  }
  return best;
}

// V from the analytic gradient and Laplacian of the pair potentials.
double analytic_potential(double omega, double lambda, const std::vector<double>& x) {
  const std::size_t n = x.size();
  double lap = 0.0, grad2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double g = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = x[i] - x[j];
      g += 2.0 * omega * d;
      lap += 2.0 * omega;
      if (lambda != 0.0) {
        if (d == 0.0) return kNaN;
        g += lambda / d;
        lap -= lambda / (d * d);
      }
    }
    grad2 += g * g;
  }
  return -lap + grad2;
}

}  // namespace

double w_value(const GroundStateField& field, std::span<const double> x) {
  if (static_cast<int>(x.size()) != field.n_particles) throw DomainError("w_value: wrong coordinate count");
  double omega = 0.0, lambda = 0.0;
  if (const auto* h = std::get_if<Harmonic>(&field.w)) {
    omega = h->omega;
  } else if (const auto* c = std::get_if<Calogero>(&field.w)) {
    omega = c->omega;
    lambda = c->lambda;
  } else {
    throw DomainError("w_value: custom W is only defined on its grid");
  }
  double w = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = x[i] - x[j];
      w += omega * d * d;
      if (lambda != 0.0) w += lambda * std::log(std::abs(d));
    }
  }
  return w;
}

std::vector<double> ground_state_potential(const GroundStateField& field, const Grid& grid) {
  validate(field, grid);
  const int n = field.n_particles;
  const long long total = grid_size(field, grid);
  std::vector<double> v(static_cast<std::size_t>(total), kNaN);
  std::vector<int> idx(n);
  std::vector<double> x(n);

  if (const auto* custom = std::get_if<CustomW>(&field.w)) {
    const double h = grid.h();
    const auto& w = custom->values;
    std::vector<long long> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * grid.points;
    for (long long p = 0; p < total; ++p) {
      decode(p, grid.points, idx);
      bool inside = true;
      for (int i = 0; i < n; ++i) inside = inside && idx[i] >= 2 && idx[i] <= grid.points - 3;
      if (!inside) continue;
      double value = 0.0;
      for (int i = 0; i < n; ++i) {
        const double wm2 = w[p - 2 * stride[i]], wm1 = w[p - stride[i]], w0 = w[p];
        const double wp1 = w[p + stride[i]], wp2 = w[p + 2 * stride[i]];
        const double d1 = (wm2 - 8.0 * wm1 + 8.0 * wp1 - wp2) / (12.0 * h);
        const double d2 = (-wm2 + 16.0 * wm1 - 30.0 * w0 + 16.0 * wp1 - wp2) / (12.0 * h * h);
        value += -d2 + d1 * d1;
      }
      v[p] = value;
    }
    return v;
  }

  double omega = 0.0, lambda = 0.0;
  if (const auto* hm = std::get_if<Harmonic>(&field.w)) {
    omega = hm->omega;
  } else {
    const auto& c = std::get<Calogero>(field.w);
    omega = c.omega;
    lambda = c.lambda;
  }
  for (long long p = 0; p < total; ++p) {
    decode(p, grid.points, idx);
    for (int i = 0; i < n; ++i) x[i] = grid.x(idx[i]);
    v[p] = analytic_potential(omega, lambda, x);
  }
  return v;
}

ResidualReport residual_check(const GroundStateField& field, const Grid& grid, int exclusion_cells) {
  validate(field, grid);
  const int n = field.n_particles;
  const long long total = grid_size(field, grid);
  const double h = grid.h();
  const auto v = ground_state_potential(field, grid);
  const bool calogero = std::holds_alternative<Calogero>(field.w);

  std::vector<double> omega(static_cast<std::size_t>(total));
  std::vector<int> idx(n);
  std::vector<double> x(n);
  const auto* custom = std::get_if<CustomW>(&field.w);
  for (long long p = 0; p < total; ++p) {
    if (custom) {
      omega[p] = std::exp(-custom->values[p]);
      continue;
    }
    decode(p, grid.points, idx);
    for (int i = 0; i < n; ++i) x[i] = grid.x(idx[i]);
    omega[p] = std::exp(-w_value(field, x));
  }

  std::vector<long long> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * grid.points;
  double num = 0.0, den = 0.0;
  long long used = 0;
  for (long long p = 0; p < total; ++p) {
    decode(p, grid.points, idx);
    bool inside = true;
    for (int i = 0; i < n; ++i) inside = inside && idx[i] >= 2 && idx[i] <= grid.points - 3;
    if (!inside || std::isnan(v[p])) continue;
    if (calogero) {
      for (int i = 0; i < n; ++i) x[i] = grid.x(idx[i]);
      if (min_separation(x) < exclusion_cells * h) continue;
    }
    double lap = 0.0;
    for (int i = 0; i < n; ++i) {
      const long long s = stride[i];
      lap += (-omega[p - 2 * s] + 16.0 * omega[p - s] - 30.0 * omega[p] + 16.0 * omega[p + s] - omega[p + 2 * s]) /
             (12.0 * h * h);
    }
    const double r = -lap + v[p] * omega[p];
    num += r * r;
    den += omega[p] * omega[p];
    ++used;
  }
  if (used == 0) throw DomainError("residual_check: no admissible interior points");
  return {std::sqrt(num / den), used};
}

}  // namespace bq::functionals
