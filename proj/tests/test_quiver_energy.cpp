#include <algorithm>
#include <cmath>
#include <map>

#include "bq/errors.hpp"
#include "bq/quiver.hpp"
#include "doctest.h"

using namespace bq::quiver;

namespace {

QuiverParams regime(int alpha_q, int beta_q, BondConvention conv = BondConvention::Ordered) {
  QuiverParams p;
  p.U = 100;
  p.t = 1;
  p.J = 0.6;
  p.k = 1.8;
  p.alpha_q = alpha_q;
  p.beta_q = beta_q;
  p.bonds = conv;
  return p;
}

// Literal oracle: sums over site coordinates with explicit directions.
double oracle_energy(const Occupation& occ, int lx, int ly, const QuiverParams& p) {
  auto at = [&](int x, int y) { return occ[y * lx + x]; };
  auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < lx && y < ly; };
  auto n = [](SiteState s, int spin) { return spin == 0 ? n_up(s) : n_down(s); };
  auto h = [](SiteState s) { return (1 - n_up(s)) * (1 - n_down(s)); };
  const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  const double half = p.bonds == BondConvention::Ordered ? 1.0 : 0.5;
  double e = 0.0;
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      const SiteState a = at(x, y);
      e += p.U * n_up(a) * n_down(a);
      for (int d = 0; d < 4; ++d) {
        if (!inside(x + dx[d], y + dy[d])) continue;
        const SiteState b = at(x + dx[d], y + dy[d]);
        for (int s = 0; s < 2; ++s) {
          e -= half * p.t * n(b, s) * (1 - n(a, s));
          e += half * p.k * h(a) * h(b);
        }
      }
      for (int s = 0; s < 2; ++s) {
        const double pref = p.alpha_q + p.beta_q * h(a);
        for (int d1 = 0; d1 < 4; ++d1) {
          for (int d2 = 0; d2 < 4; ++d2) {
            if (dx[d1] * dx[d2] + dy[d1] * dy[d2] != 0) continue;  // perpendicular only
            if (!inside(x + dx[d1], y + dy[d1]) || !inside(x + dx[d2], y + dy[d2])) continue;
            const SiteState na = at(x + dx[d1], y + dy[d1]), np = at(x + dx[d2], y + dy[d2]);
            for (int sp = 0; sp < 2; ++sp) e -= p.J * pref * n(np, sp) * (1 - n(na, sp));
          }
        }
      }
    }
  }
  return e;
}

Occupation from_index(long idx, int sites) {
  Occupation occ(sites);
  for (int s = sites - 1; s >= 0; --s) {
    occ[s] = static_cast<SiteState>(idx % 4);
    idx /= 4;
  }
  return occ;
}

// Naive search over all 4^N states in increasing base-4 order.
std::pair<double, std::vector<Occupation>> naive_search(int lx, int ly, const QuiverParams& p, int electrons) {
  const int n = lx * ly;
  double best = 1e300;
  std::vector<Occupation> arg;
  for (long idx = 0; idx < (1L << (2 * n)); ++idx) {
    const Occupation occ = from_index(idx, n);
    if (electron_count(occ) != electrons) continue;
    const double e = oracle_energy(occ, lx, ly, p);
    if (e < best - 1e-9) {
      best = e;
      arg.assign(1, occ);
    } else if (std::abs(e - best) <= 1e-9) {
      arg.push_back(occ);
    }
  }
  return {best, arg};
}

Occupation spin_flip(const Occupation& occ) {
  Occupation out = occ;
  for (auto& s : out) {
    if (s == SiteState::Up) s = SiteState::Down;
    else if (s == SiteState::Down) s = SiteState::Up;
  }
  return out;
}

}  // namespace

TEST_CASE("lattice neighbours, bonds and NNN pairs") {
  const Lattice open(3, 3);
  CHECK(open.bonds().size() == 12);
  CHECK(open.neighbours(4) == std::vector<int>{1, 3, 5, 7});
  CHECK(open.nnn_pairs(4).size() == 8);  // 4 diagonal pairs, both orders
  CHECK(open.nnn_pairs(0).size() == 2);
  CHECK(open.nnn_pairs(1).size() == 4);
  const Lattice all(3, 3, Boundary::Open, NnnMode::AllPairs);
  CHECK(all.nnn_pairs(4).size() == 12);
  const Lattice periodic(4, 4, Boundary::Periodic);
  for (int s = 0; s < 16; ++s) {
    CHECK(periodic.neighbours(s).size() == 4);
    CHECK(periodic.nnn_pairs(s).size() == 8);
  }
  CHECK(periodic.bonds().size() == 32);
  CHECK(Lattice(2, 1).bonds().size() == 1);
  CHECK(Lattice(2, 2, Boundary::Periodic).bonds().size() == 4);
  CHECK_THROWS_AS(Lattice(0, 3), bq::DomainError);
}

TEST_CASE("hand-counted energies") {
  const auto p = regime(1, 0);
  CHECK(energy(parse_occupation("ud"), Lattice(2, 1), p) == -2.0);
  CHECK(energy(parse_occupation("D."), Lattice(2, 1), p) == 98.0);
  CHECK(energy(parse_occupation("uddu"), Lattice(2, 2), p) == -8.0);
  CHECK(to_string(parse_occupation("Dud.")) == "Dud.");
  CHECK_THROWS_AS(parse_occupation("x"), bq::DomainError);
}

TEST_CASE("energy matches the literal oracle on random occupations") {
  std::uint64_t state = 12345;
  auto next = [&] { return (state = state * 6364136223846793005ULL + 1442695040888963407ULL) >> 33; };
  for (int trial = 0; trial < 300; ++trial) {
    const Occupation occ = from_index(static_cast<long>(next() % (1L << 24)), 12);
    for (auto conv : {BondConvention::Ordered, BondConvention::Unordered}) {
      for (int a = 0; a < 2; ++a) {
        const auto p = regime(a, 1 - a, conv);
        CHECK(energy(occ, Lattice(4, 3), p) == doctest::Approx(oracle_energy(occ, 4, 3, p)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("local energy counts give exact move differences") {
  const Lattice lat(4, 4, Boundary::Periodic);
  const auto p = regime(1, 1);
  std::uint64_t state = 99;
  auto next = [&] { return (state = state * 6364136223846793005ULL + 1442695040888963407ULL) >> 33; };
  for (int trial = 0; trial < 500; ++trial) {
    Occupation occ(16);
    for (auto& s : occ) s = static_cast<SiteState>(next() % 4);
    const int a = static_cast<int>(next() % 16), b = static_cast<int>(next() % 16);
    const double e0 = energy(occ, lat, p), l0 = energy(energy_counts_near(occ, lat, a, b), p);
    occ[a] = static_cast<SiteState>(next() % 4);
    occ[b] = static_cast<SiteState>(next() % 4);
    const double e1 = energy(occ, lat, p), l1 = energy(energy_counts_near(occ, lat, a, b), p);
    CHECK(std::abs((e1 - e0) - (l1 - l0)) < 1e-9);
  }
}

TEST_CASE("energy symmetries") {
  std::uint64_t state = 7;
  auto next = [&] { return (state = state * 6364136223846793005ULL + 1442695040888963407ULL) >> 33; };
  const Lattice sq(3, 3), per(4, 4, Boundary::Periodic);
  const auto p = regime(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Occupation occ(9);
    for (auto& s : occ) s = static_cast<SiteState>(next() % 4);
    const double e = energy(occ, sq, p);
    CHECK(energy(spin_flip(occ), sq, p) == e);
    Occupation rot(9);  // 90 degree rotation (x, y) -> (2 - y, x)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) rot[x * 3 + (2 - y)] = occ[y * 3 + x];
    CHECK(energy(rot, sq, p) == e);

    Occupation big(16);
    for (auto& s : big) s = static_cast<SiteState>(next() % 4);
    Occupation shifted(16);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) shifted[((y + 3) % 4) * 4 + (x + 1) % 4] = big[y * 4 + x];
    CHECK(energy(shifted, per, p) == energy(big, per, p));
  }
}

TEST_CASE("exact search agrees with the naive oracle") {
  const auto [e2, arg2] = naive_search(2, 1, regime(1, 0), 2);
  const auto r2 = ground_search_exact(Lattice(2, 1), regime(1, 0), 2);
  CHECK(r2.e_min == doctest::Approx(e2));
  CHECK(r2.argmins == arg2);
  for (const auto& o : r2.argmins) CHECK(energy_counts(o, Lattice(2, 1)).doubles == 0);

  for (int a = 0; a < 2; ++a) {
    for (auto conv : {BondConvention::Ordered, BondConvention::Unordered}) {
      const auto p = regime(a, 1 - a, conv);
      const auto [e, arg] = naive_search(3, 3, p, 7);
      const auto r = ground_search_exact(Lattice(3, 3), p, 7);
      CHECK(r.e_min == doctest::Approx(e).epsilon(1e-13));
      CHECK(r.argmins == arg);
    }
  }
  CHECK_THROWS_AS(ground_search_exact(Lattice(4, 4), regime(1, 0), 14), bq::DomainError);
  CHECK_THROWS_AS(ground_search_exact(Lattice(2, 1), regime(1, 0), 5), bq::DomainError);
}

TEST_CASE("large U without k or J forbids double occupancy") {
  QuiverParams p = regime(1, 0);
  p.k = 0;
  p.J = 0;
  for (int electrons : {5, 7, 9}) {
    const auto r = ground_search_exact(Lattice(3, 3), p, electrons);
    for (const auto& o : r.argmins) CHECK(energy_counts(o, Lattice(3, 3)).doubles == 0);
  }
}

TEST_CASE("unconditional NNN hopping keeps holes apart") {
  for (auto conv : {BondConvention::Ordered, BondConvention::Unordered}) {
    const auto r = ground_search_exact(Lattice(3, 3), regime(1, 0, conv), 7);
    for (const auto& o : r.argmins) CHECK(pairing_diagnostics(o, Lattice(3, 3)).adjacent_pairs == 0);
  }
}

TEST_CASE("annealing on 3x3 with two holes") {
  const Lattice lat(3, 3);
  for (int a = 0; a < 2; ++a) {
    const auto p = regime(a, 1 - a);
    const double exact = ground_search_exact(lat, p, 7).e_min;
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto r = ground_search_anneal(lat, p, 7, Schedule{}, seed);
      CHECK(r.best_energy >= exact - 1e-9);
      CHECK(r.best_energy == doctest::Approx(energy(r.best, lat, p)));
      CHECK(electron_count(r.best) == 7);
      hits += std::abs(r.best_energy - exact) < 1e-9;
    }
    CHECK(hits >= 16);
  }
  const auto x = ground_search_anneal(lat, regime(0, 1), 7, Schedule{}, 5);
  const auto y = ground_search_anneal(lat, regime(0, 1), 7, Schedule{}, 5);
  CHECK(x.best == y.best);
  CHECK(x.trace == y.trace);
}

TEST_CASE("zero-temperature schedule is a monotone descent") {
  const auto r = ground_search_anneal(Lattice(4, 4), regime(0, 1), 14, Schedule{0.0, 0.5, 200}, 3);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
  CHECK_THROWS_AS(ground_search_anneal(Lattice(2, 2), regime(0, 1), 4, Schedule{1.0, 1.5, 10}, 0), bq::DomainError);
}

TEST_CASE("pairing diagnostics") {
  const Lattice lat(3, 3);
  const auto none = pairing_diagnostics(parse_occupation("ududududu"), lat);
  CHECK(none.holes == 0);
  CHECK(none.adjacent_pairs == 0);
  CHECK(none.clusters.empty());
  CHECK(none.max_cluster() == 0);

  const auto pair = pairing_diagnostics(parse_occupation("..dudud.u"), lat);
  CHECK(pair.holes == 3);
  CHECK(pair.adjacent_pairs == 1);
  CHECK(pair.clusters == std::map<int, int>{{1, 1}, {2, 1}});
  CHECK_FALSE(pair.larger_cluster);

  const auto block = pairing_diagnostics(parse_occupation("..ud..ud"), Lattice(4, 2));
  CHECK(block.adjacent_pairs == 4);
  CHECK(block.clusters == std::map<int, int>{{4, 1}});
  CHECK(block.larger_cluster);
  CHECK(block.max_cluster() == 4);

  // Periodic wrap joins the first and last column.
  const auto wrap = pairing_diagnostics(parse_occupation(".ud."), Lattice(4, 1, Boundary::Periodic));
  CHECK(wrap.clusters == std::map<int, int>{{2, 1}});
  CHECK(pairing_diagnostics(std::vector<Occupation>{parse_occupation("ud."), parse_occupation("u..")}, Lattice(3, 1))
            .size() == 2);
}

TEST_CASE("estimates") {
  const auto p = regime(1, 0);
  const auto e0 = energy_estimates(9, 0, p);
  CHECK(e0.e10 == -36.0);
  CHECK(e0.e01 == e0.e10);
  const auto e = energy_estimates(9, 2, p);
  CHECK(e.e10 == doctest::Approx(-25.8).epsilon(1e-15));
  CHECK(e.e01 == doctest::Approx(-21.6).epsilon(1e-15));
  CHECK_THROWS_AS(energy_estimates(4, 5, p), bq::DomainError);
}
