#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "bq/errors.hpp"
#include "bq/quiver.hpp"

namespace bq::quiver {

namespace {

constexpr int kMovesPerSite = 32;

SiteState make_state(int up, int down) {
  return up && down ? SiteState::Double : up ? SiteState::Up : down ? SiteState::Down : SiteState::Hole;
}

bool has(SiteState s, int spin) { return spin == 0 ? n_up(s) : n_down(s); }

bool same_energy(double x, double y) { return std::abs(x - y) <= 1e-9 * (1.0 + std::abs(x)); }

// Depth-first walk over site states in lexicographic order with an electron budget.
class Enumerator {
 public:
  Enumerator(const Lattice& lattice, const QuiverParams& p) : lattice_(lattice), p_(p) {}

  void run(Occupation& occ, int site, int remaining) {
    const int n = lattice_.sites();
    if (remaining < 0 || remaining > 2 * (n - site)) return;
    if (site == n) {
      const double e = energy(occ, lattice_, p_);
      if (best_.empty() || e < e_min_ - 1e-9 * (1.0 + std::abs(e_min_))) {
        e_min_ = e;
        best_.assign(1, occ);
      } else if (same_energy(e, e_min_)) {
        best_.push_back(occ);
      }
      return;
    }
    for (int s = 0; s < 4; ++s) {
      occ[site] = static_cast<SiteState>(s);
      run(occ, site + 1, remaining - n_elec(occ[site]));
    }
  }

  double e_min_ = 0.0;
  std::vector<Occupation> best_;

 private:
  const Lattice& lattice_;
  const QuiverParams& p_;
};

}  // namespace

SearchResult ground_search_exact(const Lattice& lattice, const QuiverParams& p, int electrons) {
  p.validate();
  const int n = lattice.sites();
  if (n > kMaxExactSites) throw DomainError("lattice too large for exhaustive search; use ground_search_anneal");
  if (electrons < 0 || electrons > 2 * n) throw DomainError("electron count must lie in [0, 2N]");

  // Contiguous prefix ranges over the first one or two sites, merged in order.
  const int prefix_sites = std::min(n, 2);
  const int prefixes = 1 << (2 * prefix_sites);
  std::vector<Enumerator> parts(prefixes, Enumerator(lattice, p));
  auto work = [&](int first, int stride) {
    for (int id = first; id < prefixes; id += stride) {
      Occupation occ(n, SiteState::Hole);
      int used = 0;
      for (int s = 0; s < prefix_sites; ++s) {
        occ[s] = static_cast<SiteState>((id >> (2 * (prefix_sites - 1 - s))) & 3);
        used += n_elec(occ[s]);
      }
      parts[id].run(occ, prefix_sites, electrons - used);
    }
  };
  const int threads = static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(work, i, threads);
  for (auto& th : pool) th.join();

  SearchResult result{0.0, {}};
  for (auto& part : parts) {
    if (part.best_.empty()) continue;
    if (result.argmins.empty() || part.e_min_ < result.e_min - 1e-9 * (1.0 + std::abs(result.e_min))) {
      result.e_min = part.e_min_;
      result.argmins = std::move(part.best_);
    } else if (same_energy(part.e_min_, result.e_min)) {
      result.argmins.insert(result.argmins.end(), part.best_.begin(), part.best_.end());
    }
  }
  if (result.argmins.empty()) throw DomainError("no occupation with the requested electron count");
  return result;
}

AnnealResult ground_search_anneal(const Lattice& lattice, const QuiverParams& p, int electrons,
                                  const Schedule& schedule, std::uint64_t seed) {
  p.validate();
  const int n = lattice.sites();
  if (electrons < 0 || electrons > 2 * n) throw DomainError("electron count must lie in [0, 2N]");
  if (!(schedule.t_init >= 0.0) || !(schedule.cooling > 0.0 && schedule.cooling < 1.0) || schedule.sweeps < 0) {
    throw DomainError("schedule needs t_init >= 0, cooling in (0, 1), sweeps >= 0");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Modes 2 s + spin; fill a random subset of the requested size.
  std::vector<int> modes(2 * n);
  for (int i = 0; i < 2 * n; ++i) modes[i] = i;
  std::shuffle(modes.begin(), modes.end(), rng);
  std::vector<std::array<int, 2>> filled(n, {0, 0});
  for (int i = 0; i < electrons; ++i) filled[modes[i] / 2][modes[i] % 2] = 1;
  Occupation occ(n);
  for (int s = 0; s < n; ++s) occ[s] = make_state(filled[s][0], filled[s][1]);

  double e = energy(occ, lattice, p);
  AnnealResult result{e, occ, {}};
  result.trace.reserve(schedule.sweeps);
  std::uniform_int_distribution<int> pick_site(0, n - 1);
  double temp = schedule.t_init * p.t;
  for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
    for (int step = 0; step < kMovesPerSite * n; ++step) {
      // Either flip the spin of a singly occupied site or move one electron
      // (possibly changing its spin) to a free slot elsewhere.
      const int a = pick_site(rng);
      const bool flip = unit(rng) < 0.5;
      const int spin = unit(rng) < 0.5 ? 0 : 1;
      const int to_spin = unit(rng) < 0.5 ? 0 : 1;
      const int b = flip ? a : pick_site(rng);
      const SiteState old_a = occ[a], old_b = occ[b];
      if (flip) {
        if (old_a != SiteState::Up && old_a != SiteState::Down) continue;
      } else if (a == b || !has(old_a, spin) || has(old_b, to_spin)) {
        continue;
      }
      const double before = energy(energy_counts_near(occ, lattice, a, b), p);
      if (flip) {
        occ[a] = old_a == SiteState::Up ? SiteState::Down : SiteState::Up;
      } else {
        occ[a] = make_state(spin == 0 ? 0 : n_up(old_a), spin == 1 ? 0 : n_down(old_a));
        occ[b] = make_state(to_spin == 0 ? 1 : n_up(old_b), to_spin == 1 ? 1 : n_down(old_b));
      }
      const double de = energy(energy_counts_near(occ, lattice, a, b), p) - before;
      if (de <= 0.0 || (temp > 0.0 && unit(rng) < std::exp(-de / temp))) {
        e += de;
        if (e < result.best_energy - 1e-9) {
          // Re-evaluate in full so the reported energy carries no drift.
          e = energy(occ, lattice, p);
          if (e < result.best_energy) {
            result.best_energy = e;
            result.best = occ;
          }
        }
      } else {
        occ[a] = old_a;
        occ[b] = old_b;
      }
    }
    e = energy(occ, lattice, p);
    result.trace.push_back(e);
    temp *= schedule.cooling;
  }
  return result;
}

}  // namespace bq::quiver
