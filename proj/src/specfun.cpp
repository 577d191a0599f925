#include "bq/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "bq/errors.hpp"

namespace bq::specfun {

namespace {

// zeta(s) to 20 significant digits (mpmath, 40-digit working precision).
constexpr std::array<std::pair<double, double>, 37> kZetaTable{{
    {4.0, 1.0823232337111381915},
    {3.0, 1.2020569031595942854},
    {2.5, 1.3414872572509171798},
    {2.0, 1.6449340668482264365},
    {1.5, 2.6123753486854883433},
    {0.5, -1.4603545088095868129},
    {0.0, -0.5},
    {-0.5, -0.20788622497735456602},
    {-1.5, -0.02548520188983303595},
    {-2.5, 0.0085169287778503305424},
    {-3.5, 0.0044410113354794319585},
    {-4.5, -0.0030916692472158338448},
    {-5.5, -0.002671458019899224599},
    {-6.5, 0.0027467679395368687584},
    {-7.5, 0.0032690395726002200217},
    {-8.5, -0.0044160328730048898084},
    {-9.5, -0.0066721722964666407568},
    {-10.5, 0.011146122473942814136},
    {-11.5, 0.020396978715942792056},
    {-12.5, -0.04057496748119457841},
    {-13.5, -0.087175255906217251469},
    {-14.5, 0.20117404938422688243},
    {-15.5, 0.49627121991205760787},
    {-16.5, -1.3032292507051139539},
    {-17.5, -3.6297592997745741279},
    {-18.5, 10.687327069021993641},
    {-19.5, 33.168325785694607879},
    {-20.5, -108.2174750587760554},
    {-21.5, -370.30187837547859954},
    {-22.5, 1326.0458117490156281},
    {-23.5, 4959.5983150430436114},
    {-24.5, -19338.941988374620291},
    {-25.5, -78486.148569217686891},
    {-26.5, 331023.64874545032181},
    {-27.5, 1448811.3705827264293},
    {-28.5, -6571686.4915699575213},
    {-29.5, -30854533.47239676361},
}};

constexpr int kRobinsonTerms = 30;
constexpr double kBranchSwitch = 0.5;

}  // namespace

PolylogOrder polylog_order(double s) {
  if (s == 0.5) return PolylogOrder::Half;
  if (s == 1.5) return PolylogOrder::ThreeHalves;
  if (s == 2.5) return PolylogOrder::FiveHalves;
  throw DomainError("polylog: unsupported order " + std::to_string(s) + " (only 1/2, 3/2, 5/2)");
}

double zeta_const(double s) {
  for (const auto& [key, value] : kZetaTable) {
    if (std::abs(key - s) < 1e-12) return value;
  }
  throw DomainError("zeta_const: s = " + std::to_string(s) + " is not tabulated");
}

namespace {

// k^(-s) for the first few hundred k, per order.
const std::array<double, 256>& inverse_powers(PolylogOrder order) {
  static const auto tables = [] {
    std::array<std::array<double, 256>, 3> t{};
    for (int o = 0; o < 3; ++o) {
      const double s = 0.5 + o;
      for (int k = 1; k < 256; ++k) t[o][k] = std::pow(static_cast<double>(k), -s);
    }
    return t;
  }();
  return tables[static_cast<int>(order)];
}

}  // namespace

double polylog_series(PolylogOrder order, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("polylog_series: z outside [0, 1]");
  const double s = order_value(order);
  const auto& inv = inverse_powers(order);
  double sum = 0.0;
  double zk = 1.0;
  for (int k = 1; k < 100000; ++k) {
    zk *= z;
    const double term = zk * (k < 256 ? inv[k] : std::pow(static_cast<double>(k), -s));
    sum += term;
    if (term <= 1e-17 * sum) break;
  }
  return sum;
}

double polylog_robinson(PolylogOrder order, double mu) {
  if (!(mu >= 0.0)) throw DomainError("polylog_robinson: mu must be >= 0");
  const double s = order_value(order);
  if (order == PolylogOrder::Half && mu == 0.0) {
    throw DomainError("polylog: g_{1/2}(z) diverges at z = 1");
  }
  double leading = 0.0;
  if (mu > 0.0) leading = std::tgamma(1.0 - s) * std::pow(mu, s - 1.0);
  double sum = 0.0;
  double power = 1.0;  // (-mu)^n / n!
  for (int n = 0; n < kRobinsonTerms; ++n) {
    sum += zeta_const(s - n) * power;
    power *= -mu / (n + 1);
  }
  return leading + sum;
}

double polylog_neglog(PolylogOrder order, double mu) {
  if (!(mu >= 0.0)) throw DomainError("polylog: mu = -ln z must be >= 0");
  if (mu >= std::numbers::ln2) return polylog_series(order, std::exp(-mu));
  return polylog_robinson(order, mu);
}

double polylog(PolylogOrder order, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("polylog: z outside [0, 1]");
  if (z <= kBranchSwitch) return polylog_series(order, z);
  return polylog_robinson(order, -std::log1p(z - 1.0));
}

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("fractional order alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
}

LogNormalWidth::LogNormalWidth(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0 && std::isfinite(sigma))) {
    throw DomainError("lognormal width sigma must be > 0, got " + std::to_string(sigma));
  }
}

double lognormal_pdf(LogNormalWidth width, double x) {
  if (!(x > 0.0)) throw DomainError("lognormal_pdf: x must be > 0");
  const double s = width.value();
  const double d = std::log(x) - s * s;
  return std::exp(-d * d / (2 * s * s)) / (x * s * std::sqrt(2 * std::numbers::pi));
}

}  // namespace bq::specfun
