#include <cmath>
#include <limits>

#include "bq/errors.hpp"
#include "bq/functionals.hpp"
#include "doctest.h"

using namespace bq::functionals;

TEST_CASE("constant W gives zero potential") {
  const Grid grid{-1.0, 1.0, 21};
  const GroundStateField field{2, CustomW{std::vector<double>(21 * 21, 3.5)}};
  const auto v = ground_state_potential(field, grid);
  int defined = 0;
  for (double x : v) {
    if (std::isnan(x)) continue;
    CHECK(x == 0.0);
    ++defined;
  }
  CHECK(defined == 17 * 17);
}

TEST_CASE("harmonic pair: V = 8 w^2 (x1 - x2)^2 - 4 w") {
  const double w = 1.7;
  const Grid grid{-1.0, 1.0, 11};
  const auto v = ground_state_potential(GroundStateField{2, Harmonic{w}}, grid);
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      const double d = grid.x(i) - grid.x(j);
      CHECK(v[i * 11 + j] == doctest::Approx(8 * w * w * d * d - 4 * w).epsilon(1e-13));
    }
  }
}

TEST_CASE("Calogero potential against a symbolic second derivative") {
  // N = 2: W = w d^2 + lam ln|d|, d = x1 - x2.
  // dW/dx1 = 2 w d + lam / d = -dW/dx2;  d2W/dx1^2 = 2 w - lam / d^2.
  const double w = 0.8, lam = -1.5;
  const Grid grid{-1.0, 1.0, 9};
  const auto v = ground_state_potential(GroundStateField{2, Calogero{w, lam}}, grid);
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const double d = grid.x(i) - grid.x(j);
      if (i == j) {
        CHECK(std::isnan(v[i * 9 + j]));
        continue;
      }
      const double g = 2 * w * d + lam / d;
      const double expect = 2 * g * g - 2 * (2 * w - lam / (d * d));
      CHECK(v[i * 9 + j] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("three harmonic particles: custom grid matches analytic V") {
  const Grid grid{-1.0, 1.0, 41};
  const GroundStateField analytic{3, Harmonic{0.9}};
  std::vector<double> samples;
  for (int i = 0; i < 41; ++i)
    for (int j = 0; j < 41; ++j)
      for (int k = 0; k < 41; ++k) {
        const std::array<double, 3> x{grid.x(i), grid.x(j), grid.x(k)};
        samples.push_back(w_value(analytic, x));
      }
  const auto va = ground_state_potential(analytic, grid);
  const auto vc = ground_state_potential(GroundStateField{3, CustomW{samples}}, grid);
  for (std::size_t p = 0; p < va.size(); ++p) {
    if (std::isnan(vc[p])) continue;
    CHECK(std::abs(va[p] - vc[p]) < 1e-9);
  }
}

TEST_CASE("residual of the Schroedinger operator on the ground state") {
  const Grid grid{-1.0, 1.0, 101};
  const auto w1 = residual_check(GroundStateField{2, Harmonic{1.0}}, grid);
  CHECK(w1.residual < 1e-4);
  CHECK(w1.points_used == 97 * 97);
  for (double lam : {-1.0, -2.0}) {
    const auto w2 = residual_check(GroundStateField{2, Calogero{1.0, lam}}, grid);
    CHECK(w2.residual < 1e-4);
    CHECK(w2.points_used < 97 * 97);
  }
  // Custom samples: the potential is differenced from the same W.
  std::vector<double> shifted;
  for (int i = 0; i < 101; ++i)
    for (int j = 0; j < 101; ++j) {
      const double d = grid.x(i) - grid.x(j);
      shifted.push_back(1.0 * d * d + 0.3 * grid.x(i));
    }
  const auto custom = residual_check(GroundStateField{2, CustomW{shifted}}, grid);
  CHECK(custom.residual < 1e-4);
}

TEST_CASE("ground state input validation") {
  CHECK_THROWS_AS(ground_state_potential(GroundStateField{2, Harmonic{1.0}}, Grid{0.0, 1.0, 4}), bq::DomainError);
  CHECK_THROWS_AS(ground_state_potential(GroundStateField{2, CustomW{{1.0, 2.0}}}, Grid{0.0, 1.0, 5}),
                  bq::DomainError);
  const std::array<double, 2> x{0.1, 0.2};
  CHECK_THROWS_AS(w_value(GroundStateField{2, CustomW{}}, x), bq::DomainError);
}
