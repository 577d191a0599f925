#pragma once

// Ideal Bose gas averaged over a fugacity-exponent law nu(x): z -> z^x.
// Dimensionless units with rho lambda^3 = T^(-3/2); T is T* throughout.

#include <optional>
#include <string>
#include <vector>

namespace bq::bec {

/// Discretised nu(x): nodes x_i > 0 with weights summing to one.
class Ensemble {
 public:
  static Ensemble dirac();
  /// Lognormal with mode at 1 by Gauss-Hermite in ln x. sigma = 0 gives dirac().
  static Ensemble lognormal(double sigma, int nodes = 64);
  static Ensemble discrete(std::vector<double> atoms, std::vector<double> weights);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double sigma() const { return sigma_; }

 private:
  Ensemble(std::vector<double> nodes, std::vector<double> weights, double sigma);
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double sigma_ = 0.0;
};

/// z is treated as 1 once -ln z drops below this.
inline constexpr double kCriticalGuard = 1e-12;

double critical_temperature(const Ensemble& ens);

/// -ln z above T_c; empty in the condensed phase.
std::optional<double> solve_neglog_fugacity(double t, const Ensemble& ens);

/// Fugacity above T_c; empty in the condensed phase (caller uses z = 1).
std::optional<double> solve_fugacity(double t, const Ensemble& ens);

double internal_energy(double t, const Ensemble& ens);
double specific_heat(double t, const Ensemble& ens);

struct ThermoPoint {
  double t_star;
  double z;
  double u;
  double cv;
};

ThermoPoint thermo_point(double t, const Ensemble& ens);

struct CurveRow {
  double sigma;
  double t_star;
  double z;
  double u;
  double cv;
  double cv_fd_relerr;
};

inline constexpr double kFiniteDifferenceStep = 1e-4;

/// One row per (sigma, T) with sigma outermost; sigma = 0 is the Dirac ensemble.
std::vector<CurveRow> cv_curve(const std::vector<double>& sigmas, const std::vector<double>& t_grid,
                               int nodes = 64);

/// max |Delta C_V / Delta T| between consecutive rows with T in (t_c, 1.2 t_c].
double sharpness(const std::vector<CurveRow>& rows, double sigma, double t_c);

std::string curve_csv_header();

}  // namespace bq::bec
