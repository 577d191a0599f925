#include <cmath>
#include <complex>
#include <numbers>

#include "bq/quadrature.hpp"
#include "doctest.h"

using namespace bq::quad;
using doctest::Approx;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const auto rule = gauss_legendre<double>(8);
  CHECK(rule.weights.sum() == Approx(2.0).epsilon(1e-15));
  // x^14 is the highest even power exact for 8 nodes.
  double s = 0;
  for (Eigen::Index i = 0; i < rule.size(); ++i) s += rule.weights(i) * std::pow(rule.nodes(i), 14);
  CHECK(s == Approx(2.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Hermite and Gauss-Laguerre moments") {
  const auto gh = gauss_hermite<double>(64);
  CHECK(gh.weights.sum() == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  double m2 = 0;
  for (Eigen::Index i = 0; i < gh.size(); ++i) m2 += gh.weights(i) * gh.nodes(i) * gh.nodes(i);
  CHECK(m2 == Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-13));

  const auto gl = gauss_laguerre<double>(30);
  double m3 = 0;
  for (Eigen::Index i = 0; i < gl.size(); ++i) m3 += gl.weights(i) * std::pow(gl.nodes(i), 3);
  CHECK(gl.weights.sum() == Approx(1.0).epsilon(1e-13));
  CHECK(m3 == Approx(6.0).epsilon(1e-12));
}

TEST_CASE("composite rule covers the interval") {
  const auto r = composite_legendre<double>(1.0, 3.0, 10, 16);
  CHECK(r.size() == 160);
  CHECK(r.weights.sum() == Approx(2.0).epsilon(1e-14));
  CHECK(r.nodes.minCoeff() > 1.0);
  CHECK(r.nodes.maxCoeff() < 3.0);
}

TEST_CASE("adaptive integration of real and complex integrands") {
  auto res = integrate<double>([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  CHECK(res.converged);
  CHECK(res.value == Approx(2.0 / 3.0).epsilon(1e-12));

  auto cres = integrate<std::complex<double>>(
      [](double x) { return std::exp(std::complex<double>(0.0, 3.0 * x)); }, 0.0, 1.0);
  const std::complex<double> expect = (std::exp(std::complex<double>(0.0, 3.0)) - 1.0) /
                                      std::complex<double>(0.0, 3.0);
  CHECK(std::abs(cres.value - expect) < 1e-13);

  auto inf = integrate_to_infinity<double>([](double x) { return std::exp(-x * x); }, 0.0);
  CHECK(inf.value == Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-12));

  CHECK(integrate<double>([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("non-convergence is reported") {
  Tolerance tight{0.0, 1e-15, 4};
  auto res = integrate<double>([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, tight);
  CHECK_FALSE(res.converged);
  CHECK_THROWS_AS(integrate_or_throw<double>([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); },
                                             0.0, 1.0, tight, "probe"),
                  bq::NumericalError);
}
