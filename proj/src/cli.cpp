#include "bq/cli.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "bq/bec.hpp"
#include "bq/errors.hpp"
#include "bq/functionals.hpp"
#include "bq/io.hpp"
#include "bq/quiver.hpp"
#include "bq/specfun.hpp"

namespace bq::cli {

namespace {

using json = nlohmann::ordered_json;
using io::fmt;
namespace fn = functionals;
namespace q = quiver;

using Defaults = std::vector<std::pair<std::string, std::string>>;

const std::vector<std::pair<std::string, Defaults>>& table() {
  static const std::vector<std::pair<std::string, Defaults>> t{
      {"ml-weights", {{"alpha", "0.5"}, {"m", "3"}, {"n_max", "60"}}},
      {"functional-check",
       {{"case", "exp-mixture"}, {"dim", "1"}, {"side", "1"}, {"f_lo", "0"}, {"f_hi", "0.5"},
        {"amplitude", "3.141592653589793"}, {"rho", "2"}, {"rho_bar", "1"}, {"alpha", "0.5"},
        {"samples", "100000"}, {"n", "1024,2048,4096,8192"}}},
      {"sample-measure",
       {{"kind", "fractional"}, {"alpha", "0.5"}, {"rho", "3"}, {"side", "1"}, {"dim", "1"}, {"draws", "100000"}}},
      {"girard-limit",
       {{"length", "1"}, {"n_max", "32"}, {"betas", "0.001,0.01,0.1,1,200"}, {"rho_bar", "1"}, {"f_lo", "0"}, {"f_hi", "0.5"},
        {"amplitude", "3.141592653589793"}, {"ordering", "a-then-n"}}},
      {"bec-curve", {{"sigmas", "0.1,0.4,0.8"}, {"tmin", "0.3"}, {"tmax", "1.2"}, {"steps", "200"}, {"nodes", "64"}}},
      {"quiver-algebra", {{"lx", "2"}, {"ly", "2"}}},
      {"quiver-ground",
       {{"lx", "3"}, {"ly", "3"}, {"boundary", "open"}, {"nnn", "diagonal"}, {"electrons", "7"}, {"U", "100"},
        {"t", "1"}, {"J", "0.6"}, {"k", "1.8"}, {"alpha_q", "0"}, {"beta_q", "1"}, {"bond_convention", "ordered"},
        {"method", "exact"}, {"runs", "20"}, {"t_init", "2"}, {"cooling", "0.95"}, {"sweeps", "2000"}}},
      {"ground-potential",
       {{"kind", "harmonic"}, {"particles", "2"}, {"omega", "1"}, {"lambda", "-1"}, {"lo", "-1"}, {"hi", "1"},
        {"points", "41"}}},
  };
  return t;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/// Resolved parameters with typed accessors; every failure is a DomainError.
class Params {
 public:
  Params(const std::string& sub, const std::map<std::string, std::string>& given) {
    resolved_ = defaults(sub);
    for (const auto& [key, value] : given) {
      auto it = std::find_if(resolved_.begin(), resolved_.end(), [&](const auto& kv) { return kv.first == key; });
      if (it == resolved_.end()) throw DomainError("unknown key '" + key + "' for " + sub);
      it->second = value;
    }
  }

  const std::string& text(const std::string& key) const {
    for (const auto& kv : resolved_)
      if (kv.first == key) return kv.second;
    throw DomainError("missing key '" + key + "'");
  }

  double real(const std::string& key) const { return parse_real(key, text(key)); }

  long integer(const std::string& key) const {
    const std::string& v = text(key);
    std::size_t used = 0;
    long out = 0;
    try {
      out = std::stol(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) throw DomainError("key '" + key + "' expects an integer, got '" + v + "'");
    return out;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw DomainError("key '" + key + "' expects a comma-separated list");
    return out;
  }

  const std::string& choice(const std::string& key, std::initializer_list<const char*> options) const {
    const std::string& v = text(key);
    for (const char* o : options)
      if (v == o) return v;
    std::string all;
    for (const char* o : options) all += std::string(all.empty() ? "" : ", ") + o;
    throw DomainError("key '" + key + "' must be one of {" + all + "}, got '" + v + "'");
  }

  json as_json() const {
    json j = json::object();
    for (const auto& [k, v] : resolved_) j[k] = v;
    return j;
  }

 private:
  static double parse_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(out)) {
      throw DomainError("key '" + key + "' expects a finite number, got '" + v + "'");
    }
    return out;
  }

  Defaults resolved_;
};

struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  json results = json::object();
};

std::mt19937_64 engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

fn::Box cube(int dim, double side) {
  if (dim < 1 || dim > 3) throw DomainError("dim must be 1, 2 or 3");
  return fn::Box(std::vector<double>(dim, side));
}

fn::TestFunction indicator(const Params& p, int dim) {
  return fn::TestFunction::indicator(std::vector<double>(dim, p.real("f_lo")), std::vector<double>(dim, p.real("f_hi")),
                                     p.real("amplitude"));
}

// ---------------------------------------------------------------------------

Outputs ml_weights(const Params& p, std::uint64_t) {
  const specfun::FractionalOrder alpha(p.real("alpha"));
  const long n_max = p.integer("n_max");
  if (n_max < 0 || n_max > 10000) throw DomainError("n_max must lie in [0, 10000]");
  const auto w = specfun::fractional_poisson_weights(alpha, p.real("m"), static_cast<int>(n_max));
  io::Csv csv({"n", "p_n", "cumulative"});
  double cum = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    cum += w[n];
    csv.add_row({std::to_string(n), fmt(w[n]), fmt(cum)});
  }
  Outputs out;
  out.files.push_back({"weights.csv", csv.str()});
  out.results["sum"] = cum;
  out.results["tail"] = 1.0 - cum;
  out.results["mean_closed_form"] = p.real("m") / std::tgamma(alpha.value() + 1.0);
  return out;
}

Outputs functional_check(const Params& p, std::uint64_t seed) {
  const std::string& which = p.choice("case", {"exp-mixture", "poisson-mc", "fractional", "finite-nv"});
  const int dim = static_cast<int>(p.integer("dim"));
  const fn::Box box = cube(dim, p.real("side"));
  const auto f = indicator(p, dim);
  const double rho = p.real("rho");
  io::Csv csv({"case", "size", "value_re", "value_im", "reference_re", "reference_im", "abs_diff", "std_error"});
  auto row = [&](const std::string& size, std::complex<double> v, std::complex<double> ref, double se) {
    csv.add_row({which, size, fmt(v.real()), fmt(v.imag()), fmt(ref.real()), fmt(ref.imag()), fmt(std::abs(v - ref)),
                 fmt(se)});
  };
  Outputs out;
  if (which == "exp-mixture") {
    const double rho_bar = p.real("rho_bar");
    const auto a = fn::exp_integral(f, box);
    row("0", fn::char_compound(f, fn::IntensityMeasure(box, 1.0), fn::Exponential{rho_bar}),
        fn::exp_mixture_closed_form(a, rho_bar), 0.0);
    out.results["A"] = complex_json(a);
  } else if (which == "poisson-mc") {
    const fn::IntensityMeasure mu(box, rho);
    const long samples = p.integer("samples");
    auto sampler = [&](std::mt19937_64& r) { return fn::sample_poisson_config(mu, r); };
    const auto est = fn::mc_char(f, sampler, samples, seed);
    row(std::to_string(samples), est.mean, fn::char_poisson(f, mu), est.std_error);
  } else if (which == "fractional") {
    const fn::IntensityMeasure mu(box, rho);
    const double alpha = p.real("alpha");
    row("0", fn::char_fractional(f, mu, specfun::FractionalOrder(alpha)),
        fn::mixture_transform(rho * fn::exp_integral(f, box), fn::FractionalNu{alpha}), 0.0);
  } else {
    if (!(rho > 0.0)) throw DomainError("finite-nv needs rho > 0");
    double prev = -1.0;
    json ratios = json::array();
    for (double nv : p.reals("n")) {
      const auto n = static_cast<long long>(nv);
      if (nv != static_cast<double>(n) || n < 1) throw DomainError("n must list positive integers");
      const fn::Box big = cube(dim, std::pow(static_cast<double>(n) / rho, 1.0 / dim));
      const auto v = fn::char_finite_nv(f, n, big);
      const auto ref = std::exp(rho * fn::exp_integral(f, big));
      row(std::to_string(n), v, ref, 0.0);
      const double err = std::abs(v - ref);
      if (prev > 0.0) ratios.push_back(err / prev);
      prev = err;
    }
    out.results["error_ratios"] = ratios;
  }
  out.files.push_back({"check.csv", csv.str()});
  return out;
}

Outputs sample_measure(const Params& p, std::uint64_t seed) {
  const std::string& kind = p.choice("kind", {"poisson", "fractional"});
  const int dim = static_cast<int>(p.integer("dim"));
  const fn::IntensityMeasure mu(cube(dim, p.real("side")), p.real("rho"));
  const long draws = p.integer("draws");
  if (draws < 2) throw DomainError("draws must be >= 2");
  const double alpha = kind == "poisson" ? 1.0 : p.real("alpha");
  const specfun::FractionalOrder order(alpha);
  const double m = mu.mass();

  auto rng = engine(seed);
  std::vector<long> counts;
  double s = 0.0, s2 = 0.0;
  for (long i = 0; i < draws; ++i) {
    const std::size_t k = kind == "poisson" ? fn::sample_poisson_config(mu, rng).size()
                                            : fn::sample_fractional_config(mu, order, rng).size();
    if (k >= counts.size()) counts.resize(k + 1, 0);
    ++counts[k];
    s += static_cast<double>(k);
    s2 += static_cast<double>(k) * static_cast<double>(k);
  }
  const double mean = s / draws;
  const double se = std::sqrt(std::max(0.0, s2 / draws - mean * mean) / (draws - 1));

  const int n_max = static_cast<int>(std::min<std::size_t>(counts.size() + 50, 10000));
  std::vector<double> w;
  if (kind == "poisson") {
    for (int k = 0; k <= n_max; ++k) w.push_back(std::exp(k * std::log(m) - m - std::lgamma(k + 1.0)));
  } else {
    w = fn::weights_fractional(order, m, n_max);
  }
  io::Csv csv({"count", "observed", "expected"});
  for (std::size_t k = 0; k < counts.size(); ++k) {
    csv.add_row({std::to_string(k), std::to_string(counts[k]), fmt(draws * (k < w.size() ? w[k] : 0.0))});
  }
  // Leading bins with expected count >= 5, the remainder pooled into one tail bin.
  double chi2 = 0.0, head_obs = 0.0, tail_p = 1.0;
  int bins = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double expected = draws * w[k];
    if (expected < 5.0) break;
    const double obs = k < counts.size() ? static_cast<double>(counts[k]) : 0.0;
    chi2 += (obs - expected) * (obs - expected) / expected;
    head_obs += obs;
    tail_p -= w[k];
    ++bins;
  }
  const double tail_expected = draws * tail_p, tail_obs = draws - head_obs;
  if (tail_expected > 0.0) chi2 += (tail_obs - tail_expected) * (tail_obs - tail_expected) / tail_expected;
  Outputs out;
  out.files.push_back({"counts.csv", csv.str()});
  out.results["mean"] = mean;
  out.results["std_error"] = se;
  out.results["expected_mean"] = m / std::tgamma(alpha + 1.0);
  out.results["chi2"] = chi2;
  out.results["dof"] = bins;
  out.results["p_value"] = bins > 0 ? boost::math::cdf(boost::math::complement(boost::math::chi_squared(bins), chi2))
                                    : 1.0;
  return out;
}

Outputs girard_limit(const Params& p, std::uint64_t) {
  const double length = p.real("length");
  const long n_max = p.integer("n_max");
  if (n_max < 1 || n_max > 2048) throw DomainError("n_max must lie in [1, 2048]");
  const auto ordering = p.choice("ordering", {"a-then-n", "n-then-a"}) == "a-then-n"
                            ? fn::GirardOrdering::AThenOccupation
                            : fn::GirardOrdering::OccupationThenA;
  const auto f = indicator(p, 1);
  const double rho_bar = p.real("rho_bar");
  const auto limit = fn::exp_mixture_closed_form(fn::exp_integral(f, fn::Box({length})), rho_bar);
  io::Csv csv({"beta", "n_max", "re", "im", "limit_re", "limit_im", "abs_err", "truncation_change"});
  for (double beta : p.reals("betas")) {
    const fn::GirardParams gp{length, static_cast<int>(n_max), beta, rho_bar, ordering};
    fn::GirardParams doubled = gp;
    doubled.n_max *= 2;
    const auto l = fn::girard_functional(f, gp);
    const auto l2 = fn::girard_functional(f, doubled);
    csv.add_row({fmt(beta), std::to_string(n_max), fmt(l.real()), fmt(l.imag()), fmt(limit.real()), fmt(limit.imag()),
                 fmt(std::abs(l - limit)), fmt(std::abs(l2 - l))});
  }
  Outputs out;
  out.files.push_back({"girard.csv", csv.str()});
  out.results["limit"] = complex_json(limit);
  return out;
}

Outputs bec_curve(const Params& p, std::uint64_t) {
  const double tmin = p.real("tmin"), tmax = p.real("tmax");
  const long steps = p.integer("steps");
  if (!(tmin > 0.0 && tmax > tmin) || steps < 1 || steps > 100000) {
    throw DomainError("bec-curve needs 0 < tmin < tmax and 1 <= steps <= 100000");
  }
  std::vector<double> grid;
  for (long i = 0; i <= steps; ++i) grid.push_back(tmin + (tmax - tmin) * static_cast<double>(i) / steps);
  const auto sigmas = p.reals("sigmas");
  const auto rows = bec::cv_curve(sigmas, grid, static_cast<int>(p.integer("nodes")));
  io::Table t{{"sigma", "T_star", "z", "u", "cv", "cv_fd_relerr"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.sigma, r.t_star, r.z, r.u, r.cv, r.cv_fd_relerr});
  const double tc = bec::critical_temperature(bec::Ensemble::dirac());
  Outputs out;
  out.files.push_back({"curve.csv", t.csv()});
  out.files.push_back({"curve.svg", io::svg_lines(t, "T_star", "cv", "sigma")});
  out.results["t_c"] = tc;
  json sharp = json::object();
  for (double s : sigmas) sharp[fmt(s)] = bec::sharpness(rows, s, tc);
  out.results["sharpness"] = sharp;
  double worst = 0.0;
  for (const auto& r : rows)
    if (r.t_star > 1.001 * tc) worst = std::max(worst, r.cv_fd_relerr);
  out.results["max_cv_fd_relerr_above_1.001_tc"] = worst;
  return out;
}

q::Boundary boundary(const Params& p) {
  return p.choice("boundary", {"open", "periodic"}) == "open" ? q::Boundary::Open : q::Boundary::Periodic;
}

Outputs quiver_algebra(const Params& p, std::uint64_t) {
  const q::Lattice lat(static_cast<int>(p.integer("lx")), static_cast<int>(p.integer("ly")));
  const q::FermionOps ops(lat);
  const auto comm = q::check_commutators(ops);
  const auto comp = q::check_composition(ops);
  io::Csv csv({"identity", "max_residual", "checked"});
  const long modes = 2L * lat.sites();
  csv.add_row({"car", fmt(q::car_residual(ops)), std::to_string(2 * modes * modes)});
  const char* names[] = {"rho_J", "rho_K", "J_J", "J_K", "K_K"};
  const long n = lat.sites();
  for (int i = 0; i < 5; ++i) {
    const long count = 4 * n * n * n * (i < 2 ? 1 : n);
    csv.add_row({names[i], fmt(comm.residual[i]), std::to_string(count)});
  }
  csv.add_row({"composition", fmt(comp.composition), std::to_string(2 * n * n * n * n)});
  csv.add_row({"hop_back", fmt(comp.hop_back), std::to_string(2 * n * (n - 1))});
  csv.add_row({"hop_back_same_site", fmt(comp.hop_back_diagonal), std::to_string(2 * n)});
  Outputs out;
  out.files.push_back({"algebra.csv", csv.str()});
  out.results["fock_dimension"] = ops.dimension();
  return out;
}

Outputs quiver_ground(const Params& p, std::uint64_t seed) {
  const q::Lattice lat(static_cast<int>(p.integer("lx")), static_cast<int>(p.integer("ly")), boundary(p),
                       p.choice("nnn", {"diagonal", "all-pairs"}) == "diagonal" ? q::NnnMode::Diagonal
                                                                                 : q::NnnMode::AllPairs);
  q::QuiverParams qp;
  qp.U = p.real("U");
  qp.t = p.real("t");
  qp.J = p.real("J");
  qp.k = p.real("k");
  qp.alpha_q = static_cast<int>(p.integer("alpha_q"));
  qp.beta_q = static_cast<int>(p.integer("beta_q"));
  qp.bonds = p.choice("bond_convention", {"ordered", "unordered"}) == "ordered" ? q::BondConvention::Ordered
                                                                                : q::BondConvention::Unordered;
  qp.validate();
  const int electrons = static_cast<int>(p.integer("electrons"));
  const std::string& method = p.choice("method", {"exact", "anneal"});

  Outputs out;
  double e_min = 0.0;
  std::vector<q::Occupation> argmins;
  if (method == "exact") {
    auto r = q::ground_search_exact(lat, qp, electrons);
    e_min = r.e_min;
    argmins = std::move(r.argmins);
  } else {
    const long runs = p.integer("runs");
    if (runs < 1) throw DomainError("runs must be >= 1");
    const q::Schedule schedule{p.real("t_init"), p.real("cooling"), static_cast<int>(p.integer("sweeps"))};
    std::vector<q::AnnealResult> results;
    for (long i = 0; i < runs; ++i) {
      results.push_back(q::ground_search_anneal(lat, qp, electrons, schedule, seed + static_cast<std::uint64_t>(i)));
    }
    e_min = results.front().best_energy;
    for (const auto& r : results) e_min = std::min(e_min, r.best_energy);
    int hits = 0;
    std::set<q::Occupation> distinct;
    json energies = json::array();
    for (const auto& r : results) {
      energies.push_back(r.best_energy);
      if (std::abs(r.best_energy - e_min) <= 1e-9 * (1.0 + std::abs(e_min))) {
        ++hits;
        distinct.insert(r.best);
      }
    }
    argmins.assign(distinct.begin(), distinct.end());
    out.results["run_best_energies"] = energies;
    out.results["runs_at_best"] = hits;
  }

  const auto reports = q::pairing_diagnostics(argmins, lat);
  int min_pairs = reports.front().adjacent_pairs, max_cluster = 0, all_adjacent = 0;
  io::Csv minimizers({"index", "occupation", "holes", "adjacent_pairs", "max_cluster"});
  for (std::size_t i = 0; i < argmins.size(); ++i) {
    const auto& r = reports[i];
    min_pairs = std::min(min_pairs, r.adjacent_pairs);
    max_cluster = std::max(max_cluster, r.max_cluster());
    all_adjacent += r.adjacent_pairs > 0;
    minimizers.add_row({std::to_string(i), q::to_string(argmins[i]), std::to_string(r.holes),
                        std::to_string(r.adjacent_pairs), std::to_string(r.max_cluster())});
  }
  const int holes = reports.front().holes;
  io::Csv ground({"Lx", "Ly", "boundary", "electrons", "H", "alpha_q", "beta_q", "U", "t", "J", "k", "bond_convention",
                  "E_min", "n_degenerate", "adjacent_hole_pairs", "max_cluster"});
  ground.add_row({std::to_string(lat.lx()), std::to_string(lat.ly()), p.text("boundary"), std::to_string(electrons),
                  std::to_string(holes), std::to_string(qp.alpha_q), std::to_string(qp.beta_q), fmt(qp.U), fmt(qp.t),
                  fmt(qp.J), fmt(qp.k), p.text("bond_convention"), fmt(e_min), std::to_string(argmins.size()),
                  std::to_string(min_pairs), std::to_string(max_cluster)});
  out.files.push_back({"ground.csv", ground.str()});
  out.files.push_back({"minimizers.csv", minimizers.str()});
  // Holes in the estimates count empty sites at single occupancy: N - electrons.
  const auto est = q::energy_estimates(lat.sites(), std::max(0, lat.sites() - electrons), qp);
  out.results["estimate_e10"] = est.e10;
  out.results["estimate_e01"] = est.e01;
  out.results["standard_scenario"] = qp.standard_scenario();
  out.results["minimizers_with_adjacent_holes"] = all_adjacent;
  return out;
}

Outputs ground_potential(const Params& p, std::uint64_t) {
  const long particles = p.integer("particles");
  const long points = p.integer("points");
  if (particles < 1 || particles > 3) throw DomainError("particles must be 1, 2 or 3");
  if (points < 5 || std::pow(static_cast<double>(points), particles) > 2e6) {
    throw DomainError("points must be >= 5 with points^particles <= 2e6");
  }
  const fn::Grid grid{p.real("lo"), p.real("hi"), static_cast<int>(points)};
  fn::GroundStateField field{static_cast<int>(particles), fn::Harmonic{p.real("omega")}};
  if (p.choice("kind", {"harmonic", "calogero"}) == "calogero") {
    field.w = fn::Calogero{p.real("omega"), p.real("lambda")};
  }
  const auto v = fn::ground_state_potential(field, grid);
  std::vector<std::string> header;
  for (long i = 1; i <= particles; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("V");
  io::Csv csv(header);
  long undefined = 0;
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    std::vector<std::string> cells(particles + 1);
    std::size_t rest = idx;
    for (long d = particles - 1; d >= 0; --d) {
      cells[d] = fmt(grid.x(static_cast<int>(rest % points)));
      rest /= points;
    }
    cells[particles] = fmt(v[idx]);
    undefined += std::isnan(v[idx]);
    csv.add_row(std::move(cells));
  }
  Outputs out;
  out.files.push_back({"potential.csv", csv.str()});
  out.results["undefined_points"] = undefined;
  if (particles >= 2 && points >= 9) {
    const auto res = fn::residual_check(field, grid);
    out.results["residual"] = res.residual;
    out.results["residual_points"] = res.points_used;
  }
  return out;
}

using Handler = std::function<Outputs(const Params&, std::uint64_t)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"ml-weights", ml_weights},         {"functional-check", functional_check}, {"sample-measure", sample_measure},
      {"girard-limit", girard_limit},     {"bec-curve", bec_curve},               {"quiver-algebra", quiver_algebra},
      {"quiver-ground", quiver_ground},   {"ground-potential", ground_potential},
  };
  return h;
}

}  // namespace

std::vector<std::string> subcommands() {
  std::vector<std::string> out;
  for (const auto& [name, d] : table()) out.push_back(name);
  return out;
}

std::vector<std::pair<std::string, std::string>> defaults(const std::string& subcommand) {
  for (const auto& [name, d] : table())
    if (name == subcommand) return d;
  throw DomainError("unknown subcommand '" + subcommand + "'");
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw DomainError(path.string() + ":" + std::to_string(number) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

int run(const RunConfig& config, std::ostream& err) {
  Outputs outputs;
  json manifest;
  try {
    const Params params(config.subcommand, config.parameters);
    outputs = handlers().at(config.subcommand)(params, config.seed);
    manifest["subcommand"] = config.subcommand;
    manifest["seed"] = config.seed;
    manifest["parameters"] = params.as_json();
  } catch (const NumericalError& e) {
    err << "bq: numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    err << "bq: invalid input: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "bq: numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }

  try {
    std::filesystem::create_directories(config.out_dir);
    json names = json::array();
    for (const auto& [name, content] : outputs.files) {
      io::write_atomic(config.out_dir / name, content);
      names.push_back(name);
    }
    manifest["outputs"] = names;
    manifest["results"] = outputs.results;
    io::write_atomic(config.out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "bq: cannot write output: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Point-process functionals, Bose gas curves and the current-quiver lattice model."};
  std::string sub, config_path, out_dir = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  app.add_option("subcommand", sub, "Subcommand to run")->required()->check(CLI::IsMember(subcommands()));
  app.add_option("params", overrides, "key=value parameter overrides");
  app.add_option("--config", config_path, "File of key=value lines");
  app.add_option("--seed", seed, "64-bit seed (default 1)");
  app.add_option("--out", out_dir, "Output directory (default .)");
  std::string footer = "\nSubcommands and keys (defaults):\n";
  for (const auto& [name, d] : table()) {
    footer += "  " + name + "\n   ";
    for (const auto& [k, v] : d) footer += " " + k + "=" + v;
    footer += "\n";
  }
  app.footer(footer);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationError;
  }

  RunConfig config;
  config.subcommand = sub;
  config.out_dir = out_dir;
  try {
    if (!config_path.empty()) config.parameters = parse_config_file(config_path);
    if (auto it = config.parameters.find("seed"); it != config.parameters.end()) {
      std::size_t used = 0;
      config.seed = std::stoull(it->second, &used);
      if (used != it->second.size()) throw DomainError("seed must be an unsigned integer");
      config.parameters.erase(it);
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw DomainError("expected key=value, got '" + kv + "'");
      config.parameters[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  } catch (const std::exception& e) {
    std::cerr << "bq: invalid input: " << e.what() << '\n';
    return kValidationError;
  }
  if (seed) config.seed = *seed;
  return run(config, std::cerr);
}

}  // namespace bq::cli
