#pragma once

// Characteristic functionals of point-process measures on a box, their
// samplers, the grand-canonical (Girard) determinant functional on a circle,
// and the ground-state to potential map.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "bq/specfun.hpp"

namespace bq::functionals {

using cplx = std::complex<double>;

/// Axis-aligned box [0, side_0] x ... x [0, side_{d-1}].
class Box {
 public:
  explicit Box(std::vector<double> sides);
  int dim() const { return static_cast<int>(sides_.size()); }
  double side(int i) const { return sides_[i]; }
  double volume() const;
  bool contains(std::span<const double> x) const;

 private:
  std::vector<double> sides_;
};

/// rho times Lebesgue measure on a box.
struct IntensityMeasure {
  Box box;
  double rho;

  IntensityMeasure(Box b, double r);
  double mass() const { return rho * box.volume(); }
};

enum class Shape { Indicator, Gaussian, Cosine };

/// One summand of a test function. For Indicator, `width` is the half side
/// of the cube around `center`; for Cosine it is the support radius of the
/// raised cosine amplitude * (1 + cos(pi r / width)) / 2; for Gaussian it is
/// the standard deviation.
struct Term {
  Shape shape;
  std::vector<double> center;
  double width;
  double amplitude;
};

class TestFunction {
 public:
  TestFunction() = default;
  explicit TestFunction(std::vector<Term> terms);

  static TestFunction indicator(std::vector<double> lo, std::vector<double> hi, double amplitude);

  double operator()(std::span<const double> x) const;
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool indicator_only() const;
  int dim() const;

  /// Coordinates along axis `axis` where f fails to be smooth.
  std::vector<double> breakpoints(int axis) const;

 private:
  std::vector<Term> terms_;
};

/// Points in a box, stored as rows.
struct PointConfiguration {
  int dim = 1;
  std::vector<double> coords;  // size = count * dim

  std::size_t size() const { return coords.size() / static_cast<std::size_t>(dim); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  /// <gamma, f> = sum_j f(x_j).
  double pair(const TestFunction& f) const;
};

struct Dirac {
  double rho0;
};
struct Exponential {
  double rho_bar;
};
struct LogNormal {
  double sigma;
};
struct Discrete {
  std::vector<double> atoms;
  std::vector<double> weights;
};
struct FractionalNu {
  double alpha;
};

/// Law of the intensity in a reducible (mixed Poisson) functional.
using MixingMeasure = std::variant<Dirac, Exponential, LogNormal, Discrete, FractionalNu>;

/// Throws DomainError if parameters are non-positive or weights do not sum to 1.
void validate(const MixingMeasure& xi);

/// A = integral over the box of (exp(i f) - 1) dx (Lebesgue, no rho).
cplx exp_integral(const TestFunction& f, const Box& box);

cplx char_poisson(const TestFunction& f, const IntensityMeasure& mu);

/// ((1/V) integral exp(i f))^N.
cplx char_finite_nv(const TestFunction& f, long long n, const Box& box);

/// integral exp(rho A) dxi(rho), A from the unit-intensity measure.
cplx char_compound(const TestFunction& f, const IntensityMeasure& mu_unit, const MixingMeasure& xi);

/// Closed form of the exponential mixture, (1 - rho_bar A)^(-1), valid for rho_bar Re A < 1.
cplx exp_mixture_closed_form(cplx a, double rho_bar);

/// Mixture integral of exp(rho a) against xi, for a given exponent a.
cplx mixture_transform(cplx a, const MixingMeasure& xi);

inline constexpr double kFractionalArgumentLimit = 30.0;

/// E_alpha(rho A).
cplx char_fractional(const TestFunction& f, const IntensityMeasure& mu, specfun::FractionalOrder alpha);

std::vector<double> weights_fractional(specfun::FractionalOrder alpha, double m, int n_max);

PointConfiguration sample_poisson_config(const IntensityMeasure& mu, std::mt19937_64& rng);
PointConfiguration sample_fractional_config(const IntensityMeasure& mu, specfun::FractionalOrder alpha,
                                            std::mt19937_64& rng);

using ConfigSampler = std::function<PointConfiguration(std::mt19937_64&)>;

struct McEstimate {
  cplx mean;
  double std_error;
};

inline constexpr int kMcStreams = 16;

/// Monte Carlo estimate of E exp(i <gamma, f>) over `kMcStreams` seeded
/// streams, reduced in stream order.
McEstimate mc_char(const TestFunction& f, const ConfigSampler& sampler, long long n_samples,
                   std::uint64_t seed);

enum class GirardOrdering { AThenOccupation, OccupationThenA };

struct GirardParams {
  double circle_length;
  int n_max;
  double beta;
  double rho_bar;
  GirardOrdering ordering = GirardOrdering::AThenOccupation;
};

double girard_chemical_potential(const GirardParams& p);

/// Mode-space matrix A_{kk'} = (1/L) integral (exp(i f) - 1) exp(-i (k - k') x) dx.
Eigen::MatrixXcd girard_mode_matrix(const TestFunction& f, const GirardParams& p);

Eigen::VectorXd girard_occupations(const GirardParams& p);

/// 1 / det(m) by partial-pivot LU; SingularMatrixError on a vanishing pivot.
cplx inverse_determinant(const Eigen::MatrixXcd& m);

/// det(I - A diag(n))^(-1) (or diag(n) A with the alternative ordering).
cplx girard_functional(const TestFunction& f, const GirardParams& p);

struct Harmonic {
  double omega;
};
struct Calogero {
  double omega;
  double lambda;
};
/// W sampled on the evaluation grid itself (row-major, last coordinate fastest).
struct CustomW {
  std::vector<double> values;
};

struct GroundStateField {
  int n_particles;
  std::variant<Harmonic, Calogero, CustomW> w;
};

/// Uniform tensor grid, the same 1D axis for every particle coordinate.
struct Grid {
  double lo;
  double hi;
  int points;

  double h() const { return (hi - lo) / (points - 1); }
  double x(int i) const { return lo + i * h(); }
};

/// W at one point (analytic kinds only).
double w_value(const GroundStateField& field, std::span<const double> x);

/// V = -Laplacian W + |grad W|^2 at every grid point, row-major. Points where
/// V is undefined (coincident Calogero particles, custom-grid margins) are NaN.
std::vector<double> ground_state_potential(const GroundStateField& field, const Grid& grid);

struct ResidualReport {
  double residual;
  long long points_used;
};

/// ||(-Laplacian + V) exp(-W)|| / ||exp(-W)|| over interior points with a
/// fourth-order stencil; Calogero coincidences within `exclusion_cells` grid
/// cells are skipped.
ResidualReport residual_check(const GroundStateField& field, const Grid& grid, int exclusion_cells = 3);

}  // namespace bq::functionals
