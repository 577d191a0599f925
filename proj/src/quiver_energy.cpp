#include <algorithm>
#include <queue>

#include "bq/errors.hpp"
#include "bq/quiver.hpp"

namespace bq::quiver {

namespace {

int hole(SiteState s) { return s == SiteState::Hole; }

}  // namespace

Lattice::Lattice(int lx, int ly, Boundary boundary, NnnMode nnn)
    : lx_(lx), ly_(ly), boundary_(boundary), nnn_mode_(nnn) {
  if (lx < 1 || ly < 1) throw DomainError("lattice dimensions must be positive");
  const int n = sites();
  neighbours_.resize(n);
  nnn_.resize(n);
  // Unit displacements of each neighbour; needed to pick perpendicular pairs.
  std::vector<std::vector<std::pair<int, std::array<int, 2>>>> steps(n);
  const std::array<std::array<int, 2>, 4> dirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      const int s = y * lx + x;
      for (const auto& d : dirs) {
        int nx = x + d[0], ny = y + d[1];
        if (boundary == Boundary::Periodic) {
          nx = (nx + lx) % lx;
          ny = (ny + ly) % ly;
        } else if (nx < 0 || nx >= lx || ny < 0 || ny >= ly) {
          continue;
        }
        const int t = ny * lx + nx;
        if (t == s) continue;
        steps[s].push_back({t, d});
      }
    }
  }
  for (int s = 0; s < n; ++s) {
    for (const auto& [t, d] : steps[s]) neighbours_[s].push_back(t);
    std::sort(neighbours_[s].begin(), neighbours_[s].end());
    neighbours_[s].erase(std::unique(neighbours_[s].begin(), neighbours_[s].end()), neighbours_[s].end());
    for (int t : neighbours_[s]) {
      if (s < t) bonds_.push_back({s, t});
    }
    for (const auto& [u, du] : steps[s]) {
      for (const auto& [v, dv] : steps[s]) {
        if (u == v) continue;
        const bool perpendicular = du[0] * dv[0] + du[1] * dv[1] == 0;
        if (nnn == NnnMode::Diagonal && !perpendicular) continue;
        nnn_[s].push_back({u, v});
      }
    }
    std::sort(nnn_[s].begin(), nnn_[s].end());
    nnn_[s].erase(std::unique(nnn_[s].begin(), nnn_[s].end()), nnn_[s].end());
  }
  std::sort(bonds_.begin(), bonds_.end());
}

bool Lattice::adjacent(int a, int b) const {
  const auto& nb = neighbours_[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

void QuiverParams::validate() const {
  for (double v : {U, t, k, J}) {
    if (!(v >= 0.0)) throw DomainError("quiver couplings U, t, k, J must be >= 0");
  }
  if ((alpha_q != 0 && alpha_q != 1) || (beta_q != 0 && beta_q != 1)) {
    throw DomainError("alpha_q and beta_q must be 0 or 1");
  }
}

bool QuiverParams::standard_scenario() const { return alpha_q + beta_q == 1; }

std::string to_string(const Occupation& occ) {
  static constexpr char kSymbols[] = {'D', 'u', 'd', '.'};
  std::string out;
  for (SiteState s : occ) out += kSymbols[static_cast<int>(s)];
  return out;
}

Occupation parse_occupation(const std::string& text) {
  Occupation occ;
  for (char ch : text) {
    switch (ch) {
      case 'D': occ.push_back(SiteState::Double); break;
      case 'u': occ.push_back(SiteState::Up); break;
      case 'd': occ.push_back(SiteState::Down); break;
      case '.': occ.push_back(SiteState::Hole); break;
      default: throw DomainError(std::string("occupation: unknown site symbol '") + ch + "'");
    }
  }
  return occ;
}

int electron_count(const Occupation& occ) {
  int n = 0;
  for (SiteState s : occ) n += n_elec(s);
  return n;
}

namespace {

void add_bond(EnergyCounts& c, SiteState sa, SiteState sb) {
  c.hops += n_up(sb) * (1 - n_up(sa)) + n_down(sb) * (1 - n_down(sa));
  c.hops += n_up(sa) * (1 - n_up(sb)) + n_down(sa) * (1 - n_down(sb));
  c.hole_bonds += 4 * hole(sa) * hole(sb);  // two directions, two spins
}

void add_nnn(EnergyCounts& c, const Occupation& occ, const Lattice& lattice, int a) {
  long x = 0;
  for (const auto& [n, np] : lattice.nnn_pairs(a)) {
    x += n_up(occ[np]) * (1 - n_up(occ[n])) + n_down(occ[np]) * (1 - n_down(occ[n]));
  }
  c.nnn_all += x;
  c.nnn_hole += hole(occ[a]) * x;
}

void check_size(const Occupation& occ, const Lattice& lattice) {
  if (static_cast<int>(occ.size()) != lattice.sites()) throw DomainError("occupation size does not match lattice");
}

}  // namespace

EnergyCounts energy_counts(const Occupation& occ, const Lattice& lattice) {
  check_size(occ, lattice);
  EnergyCounts c;
  for (SiteState s : occ) c.doubles += n_up(s) * n_down(s);
  for (const auto& [a, b] : lattice.bonds()) add_bond(c, occ[a], occ[b]);
  for (int a = 0; a < lattice.sites(); ++a) add_nnn(c, occ, lattice, a);
  return c;
}

EnergyCounts energy_counts_near(const Occupation& occ, const Lattice& lattice, int a, int b) {
  check_size(occ, lattice);
  EnergyCounts c;
  std::vector<int> centres{a, b};
  const std::vector<int> touched = a == b ? std::vector<int>{a} : std::vector<int>{a, b};
  for (int s : touched) {
    c.doubles += n_up(occ[s]) * n_down(occ[s]);
    for (int t : lattice.neighbours(s)) {
      // A bond between a and b is counted once, from a.
      if (!(s == b && t == a)) add_bond(c, occ[s], occ[t]);
      centres.push_back(t);
    }
  }
  std::sort(centres.begin(), centres.end());
  centres.erase(std::unique(centres.begin(), centres.end()), centres.end());
  for (int s : centres) add_nnn(c, occ, lattice, s);
  return c;
}

double energy(const EnergyCounts& c, const QuiverParams& p) {
  const double bond_factor = p.bonds == BondConvention::Ordered ? 1.0 : 0.5;
  // The sum over sigma of the J prefactor doubles both flags.
  return p.U * c.doubles - p.t * bond_factor * c.hops + p.k * bond_factor * c.hole_bonds -
         p.J * (2.0 * p.alpha_q * c.nnn_all + 2.0 * p.beta_q * c.nnn_hole);
}

double energy(const Occupation& occ, const Lattice& lattice, const QuiverParams& p) {
  return energy(energy_counts(occ, lattice), p);
}

int PairingReport::max_cluster() const { return clusters.empty() ? 0 : clusters.rbegin()->first; }

PairingReport pairing_diagnostics(const Occupation& occ, const Lattice& lattice) {
  check_size(occ, lattice);
  PairingReport r;
  for (SiteState s : occ) r.holes += hole(s);
  for (const auto& [a, b] : lattice.bonds()) r.adjacent_pairs += hole(occ[a]) * hole(occ[b]);
  std::vector<char> seen(occ.size(), 0);
  for (int s = 0; s < lattice.sites(); ++s) {
    if (!hole(occ[s]) || seen[s]) continue;
    int size = 0;
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      ++size;
      for (int w : lattice.neighbours(v)) {
        if (hole(occ[w]) && !seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
      }
    }
    ++r.clusters[size];
    if (size > 2) r.larger_cluster = true;
  }
  return r;
}

std::vector<PairingReport> pairing_diagnostics(const std::vector<Occupation>& occs, const Lattice& lattice) {
  std::vector<PairingReport> out;
  out.reserve(occs.size());
  for (const auto& o : occs) out.push_back(pairing_diagnostics(o, lattice));
  return out;
}

Estimates energy_estimates(int n_sites, int holes, const QuiverParams& p) {
  if (n_sites < 1 || holes < 0 || holes > n_sites) throw DomainError("estimates need 0 <= H <= N, N >= 1");
  const double e = n_sites - holes;
  const double hop = -p.t * e * (e - 1.0) / 2.0;
  return {hop - 4.0 * p.J * holes, hop - 2.0 * p.J * holes + p.k * holes / 2.0};
}

std::string ground_csv_header() {
  return "Lx,Ly,boundary,electrons,H,alpha_q,beta_q,U,t,J,k,bond_convention,E_min,n_degenerate,adjacent_hole_pairs,"
         "max_cluster";
}

}  // namespace bq::quiver
