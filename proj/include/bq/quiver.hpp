#pragma once

// Current quiver on a square lattice: Jordan-Wigner fermion operators for
// exact algebra checks, the 4x4 vertex representation, the diagonal
// stationary energy in number-operator form, and ground-state search.

#include <Eigen/Sparse>

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bq::quiver {

enum class Boundary { Open, Periodic };

/// Which neighbour pairs of a site enter the J term.
enum class NnnMode {
  Diagonal,  // perpendicular neighbours, distance sqrt(2)
  AllPairs,  // every pair of distinct neighbours
};

/// Sites are numbered s = y * lx + x.
class Lattice {
 public:
  Lattice(int lx, int ly, Boundary boundary = Boundary::Open, NnnMode nnn = NnnMode::Diagonal);

  int lx() const { return lx_; }
  int ly() const { return ly_; }
  int sites() const { return lx_ * ly_; }
  Boundary boundary() const { return boundary_; }
  NnnMode nnn_mode() const { return nnn_mode_; }

  /// Distinct nearest neighbours of s, sorted.
  const std::vector<int>& neighbours(int s) const { return neighbours_[s]; }
  /// Unordered bonds (a < b), sorted.
  const std::vector<std::pair<int, int>>& bonds() const { return bonds_; }
  /// Ordered pairs (n, n') of distinct neighbours of a selected by the NNN mode.
  const std::vector<std::pair<int, int>>& nnn_pairs(int a) const { return nnn_[a]; }
  bool adjacent(int a, int b) const;

 private:
  int lx_, ly_;
  Boundary boundary_;
  NnnMode nnn_mode_;
  std::vector<std::vector<int>> neighbours_;
  std::vector<std::pair<int, int>> bonds_;
  std::vector<std::vector<std::pair<int, int>>> nnn_;
};

enum class BondConvention {
  Ordered,    // each bond in both directions
  Unordered,  // each bond once: half the ordered t and k sums
};

struct QuiverParams {
  double U = 100.0;
  double t = 1.0;
  double k = 1.8;
  double J = 0.6;
  int alpha_q = 0;
  int beta_q = 1;
  BondConvention bonds = BondConvention::Ordered;

  /// Throws DomainError on negative couplings or flags outside {0, 1}.
  void validate() const;
  /// (alpha_q, beta_q) is (1, 0) or (0, 1).
  bool standard_scenario() const;
};

/// Site states in vertex-basis order.
enum class SiteState : std::uint8_t { Double = 0, Up = 1, Down = 2, Hole = 3 };

inline int n_up(SiteState s) { return s == SiteState::Double || s == SiteState::Up; }
inline int n_down(SiteState s) { return s == SiteState::Double || s == SiteState::Down; }
inline int n_elec(SiteState s) { return n_up(s) + n_down(s); }

using Occupation = std::vector<SiteState>;

/// Compact text form, one character per site: 'D', 'u', 'd', '.'.
std::string to_string(const Occupation& occ);
Occupation parse_occupation(const std::string& text);

int electron_count(const Occupation& occ);

/// Integer tallies of each energy term; the energy is a fixed linear form in them.
struct EnergyCounts {
  long doubles = 0;   // sum_a n_up n_dn
  long hops = 0;      // ordered sum over bonds and spins of n_s(b)(1 - n_s(a))
  long hole_bonds = 0;  // ordered sum over bonds and spins of h(a)h(b)
  long nnn_all = 0;   // sum_a sum_[n n'], s' of n_s'(n')(1 - n_s'(n))
  long nnn_hole = 0;  // same, weighted by h(a)
};

EnergyCounts energy_counts(const Occupation& occ, const Lattice& lattice);
/// Terms that depend on sites a or b; differences of these give move energies.
EnergyCounts energy_counts_near(const Occupation& occ, const Lattice& lattice, int a, int b);
double energy(const EnergyCounts& c, const QuiverParams& p);
double energy(const Occupation& occ, const Lattice& lattice, const QuiverParams& p);

// ---------------------------------------------------------------------------
// Exact operator algebra.

using cplx = std::complex<double>;
using FockOperator = Eigen::SparseMatrix<cplx>;

enum class Spin { Up = 0, Down = 1 };

inline constexpr int kMaxAlgebraSites = 6;

/// Annihilators c_{s,sigma} on the 4^N Fock space; mode index = 2 s + sigma.
class FermionOps {
 public:
  explicit FermionOps(const Lattice& lattice);

  int sites() const { return sites_; }
  long dimension() const { return 1L << (2 * sites_); }
  const FockOperator& c(int site, Spin s) const { return c_[2 * site + static_cast<int>(s)]; }
  const FockOperator& cdag(int site, Spin s) const { return cdag_[2 * site + static_cast<int>(s)]; }
  const FockOperator& identity() const { return identity_; }

 private:
  int sites_;
  std::vector<FockOperator> c_, cdag_;
  FockOperator identity_;
};

struct CurrentOps {
  FockOperator rho;  // rho(a)
  FockOperator J;    // J(a, b)
  FockOperator K;    // K(a, b)
  FockOperator V;    // V(a, b) = (K + iJ) / 2
};

CurrentOps current_ops(const FermionOps& ops, int a, int b, Spin s);

/// Frobenius norm.
double norm(const FockOperator& m);

/// Max residual of {c_i, c_j^dag} = delta_ij and {c_i, c_j} = 0.
double car_residual(const FermionOps& ops);

struct CommutatorReport {
  std::array<double, 5> residual{};  // rho-J, rho-K, J-J, J-K, K-K
  long identities_checked = 0;
  double max() const;
};

/// The five commutator identities over every site tuple and spin pair.
CommutatorReport check_commutators(const FermionOps& ops);

struct CompositionReport {
  double composition = 0.0;    // V(a,b)V(m,n) law, every tuple
  double hop_back = 0.0;       // V(a,b)V(b,a) = rho(b)(1 - rho(a)), a != b
  double hop_back_diagonal = 0.0;  // the same identity taken literally at a = b
  long identities_checked = 0;
};

CompositionReport check_composition(const FermionOps& ops);

using Matrix4 = Eigen::Matrix4d;

struct VertexMatrices {
  Matrix4 v_up, v_down, rho_up, rho_down;
};

VertexMatrices vertex_matrices();

// ---------------------------------------------------------------------------
// Ground-state search.

/// Exhaustive search is limited to 4^N <= 2e7.
inline constexpr int kMaxExactSites = 12;

struct SearchResult {
  double e_min;
  std::vector<Occupation> argmins;  // lexicographic order
};

SearchResult ground_search_exact(const Lattice& lattice, const QuiverParams& p, int electrons);

struct Schedule {
  double t_init = 2.0;  // in units of t
  double cooling = 0.95;
  int sweeps = 2000;
};

struct AnnealResult {
  double best_energy;
  Occupation best;
  std::vector<double> trace;  // energy at the end of each sweep
};

AnnealResult ground_search_anneal(const Lattice& lattice, const QuiverParams& p, int electrons,
                                  const Schedule& schedule, std::uint64_t seed);

struct PairingReport {
  int holes = 0;
  int adjacent_pairs = 0;
  std::map<int, int> clusters;  // cluster size -> count
  bool larger_cluster = false;  // some cluster has more than two holes
  int max_cluster() const;
};

PairingReport pairing_diagnostics(const Occupation& occ, const Lattice& lattice);
std::vector<PairingReport> pairing_diagnostics(const std::vector<Occupation>& occs, const Lattice& lattice);

struct Estimates {
  double e10;
  double e01;
};

Estimates energy_estimates(int n_sites, int holes, const QuiverParams& p);

std::string ground_csv_header();

}  // namespace bq::quiver
