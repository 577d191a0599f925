#pragma once

// Internal evaluation routes for the Mittag-Leffler family. Exposed so tests
// can drive each route directly and compare them where both apply.

#include <Eigen/Dense>

#include <complex>

#include "bq/specfun.hpp"

namespace bq::specfun::detail {

struct SeriesResult {
  std::complex<double> value;
  double abs_sum = 0;  // sum of |terms|, drives the cancellation estimate
  int terms = 0;
  bool accurate = false;  // abs_sum * eps_quad well below |value|
};

/// E_alpha^(n)(z) by compensated summation in binary128 arithmetic.
SeriesResult mittag_leffler_series(double alpha, int n, std::complex<double> z,
                                   int max_terms = 20000);

/// Tensor grid for integrals against nu_alpha on [0, tau_max]:
/// integral F(tau) nu_alpha(tau) dtau ~= sum_i w_i F(tau_i).
class NuAlphaGrid {
 public:
  NuAlphaGrid(double alpha, double tau_max, int panels);

  /// Grid whose support covers all but ~exp(-60) of nu_alpha.
  static NuAlphaGrid covering(double alpha, double extra_tau = 0.0);

  /// integral tau^n exp(x tau) nu_alpha(dtau), x <= 0.
  double laplace_moment(int n, double x) const;
  /// integral exp(z tau) nu_alpha(dtau), Re z <= 0.
  std::complex<double> laplace(std::complex<double> z) const;
  /// integral Poisson(n; m tau) nu_alpha(dtau).
  double poisson_mixture(int n, double m) const;
  /// integral nu_alpha(dtau) over the grid (should be ~1).
  double mass() const { return weights_.sum(); }

  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  double alpha_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;  // quadrature weight times density
};

/// Upper end of the bulk of nu_alpha: A(0) tau^(1/(1-alpha)) = 60.
double nu_alpha_tail(double alpha);

}  // namespace bq::specfun::detail
