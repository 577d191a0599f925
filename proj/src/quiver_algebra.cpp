#include <algorithm>
#include <bit>
#include <cmath>

#include "bq/errors.hpp"
#include "bq/quiver.hpp"

namespace bq::quiver {

namespace {

using Triplet = Eigen::Triplet<cplx>;

constexpr cplx kI{0.0, 1.0};

FockOperator commutator(const FockOperator& x, const FockOperator& y) {
  return FockOperator(x * y - y * x);
}

FockOperator anticommutator(const FockOperator& x, const FockOperator& y) {
  return FockOperator(x * y + y * x);
}

int delta(int a, int b) { return a == b ? 1 : 0; }

}  // namespace

FermionOps::FermionOps(const Lattice& lattice) : sites_(lattice.sites()) {
  if (sites_ > kMaxAlgebraSites) throw DomainError("exact operator algebra is limited to 6 sites");
  const int modes = 2 * sites_;
  const long dim = dimension();
  identity_.resize(dim, dim);
  identity_.setIdentity();
  for (int j = 0; j < modes; ++j) {
    std::vector<Triplet> entries;
    for (long state = 0; state < dim; ++state) {
      if (!((state >> j) & 1)) continue;
      // Jordan-Wigner string: parity of the occupied modes below j.
      const int below = std::popcount(static_cast<unsigned long>(state & ((1L << j) - 1)));
      entries.emplace_back(state ^ (1L << j), state, below % 2 ? -1.0 : 1.0);
    }
    FockOperator c(dim, dim);
    c.setFromTriplets(entries.begin(), entries.end());
    cdag_.push_back(FockOperator(c.adjoint()));
    c_.push_back(std::move(c));
  }
}

CurrentOps current_ops(const FermionOps& ops, int a, int b, Spin s) {
  if (a < 0 || b < 0 || a >= ops.sites() || b >= ops.sites()) throw DomainError("current_ops: site out of range");
  CurrentOps out;
  const FockOperator ab = ops.cdag(b, s) * ops.c(a, s);  // c_b^dag c_a
  const FockOperator ba = ops.cdag(a, s) * ops.c(b, s);
  out.rho = ops.cdag(a, s) * ops.c(a, s);
  out.J = -kI * (ab - ba);
  out.K = ab + ba;
  out.V = 0.5 * (out.K + kI * out.J);
  return out;
}

double norm(const FockOperator& m) { return m.norm(); }

double car_residual(const FermionOps& ops) {
  double worst = 0.0;
  const int modes = 2 * ops.sites();
  for (int i = 0; i < modes; ++i) {
    for (int j = 0; j < modes; ++j) {
      const Spin si = static_cast<Spin>(i % 2), sj = static_cast<Spin>(j % 2);
      FockOperator mixed = anticommutator(ops.c(i / 2, si), ops.cdag(j / 2, sj));
      if (i == j) mixed -= ops.identity();
      worst = std::max(worst, norm(mixed));
      worst = std::max(worst, norm(anticommutator(ops.c(i / 2, si), ops.c(j / 2, sj))));
    }
  }
  return worst;
}

double CommutatorReport::max() const { return *std::max_element(residual.begin(), residual.end()); }

CommutatorReport check_commutators(const FermionOps& ops) {
  const int n = ops.sites();
  CommutatorReport rep;
  const std::array<Spin, 2> spins{Spin::Up, Spin::Down};
  // Currents for every ordered pair and spin, built once.
  std::vector<CurrentOps> cur(static_cast<std::size_t>(2 * n * n));
  auto at = [&](int a, int b, Spin s) -> const CurrentOps& {
    return cur[(static_cast<std::size_t>(s) * n + a) * n + b];
  };
  for (Spin s : spins)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) cur[(static_cast<std::size_t>(s) * n + a) * n + b] = current_ops(ops, a, b, s);

  auto record = [&](int which, const FockOperator& lhs, const FockOperator& rhs) {
    rep.residual[which] = std::max(rep.residual[which], norm(FockOperator(lhs - rhs)));
    ++rep.identities_checked;
  };

  for (Spin s : spins) {
    for (Spin sp : spins) {
      const double same = s == sp ? 1.0 : 0.0;
      for (int m = 0; m < n; ++m) {
        for (int nn = 0; nn < n; ++nn) {
          const auto& mn = at(m, nn, sp);
          for (int a = 0; a < n; ++a) {
            const auto& rho = at(a, a, s).rho;
            const double d = delta(a, nn) - delta(a, m);
            record(0, commutator(rho, mn.J), -kI * d * same * mn.K);
            record(1, commutator(rho, mn.K), kI * d * same * mn.J);
            for (int b = 0; b < n; ++b) {
              const auto& ab = at(a, b, s);
              const auto J = [&](int x, int y) -> const FockOperator& { return at(x, y, sp).J; };
              const auto K = [&](int x, int y) -> const FockOperator& { return at(x, y, sp).K; };
              const FockOperator jj = -delta(a, m) * J(b, nn) + delta(a, nn) * J(b, m) - delta(b, nn) * J(a, m) +
                                      delta(b, m) * J(a, nn);
              record(2, commutator(ab.J, mn.J), kI * same * jj);
              const FockOperator jk = -delta(a, m) * K(nn, b) - delta(a, nn) * K(m, b) + delta(b, nn) * K(m, a) +
                                      delta(b, m) * K(nn, a);
              record(3, commutator(ab.J, mn.K), kI * same * jk);
              const FockOperator kk = delta(a, m) * J(nn, b) + delta(a, nn) * J(m, b) + delta(b, nn) * J(m, a) +
                                      delta(b, m) * J(nn, a);
              record(4, commutator(ab.K, mn.K), kI * same * kk);
            }
          }
        }
      }
    }
  }
  return rep;
}

CompositionReport check_composition(const FermionOps& ops) {
  const int n = ops.sites();
  CompositionReport rep;
  for (Spin s : {Spin::Up, Spin::Down}) {
    std::vector<FockOperator> v(static_cast<std::size_t>(n * n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) v[a * n + b] = current_ops(ops, a, b, s).V;
    auto V = [&](int a, int b) -> const FockOperator& { return v[a * n + b]; };
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int m = 0; m < n; ++m) {
          for (int nn = 0; nn < n; ++nn) {
            const FockOperator lhs = V(a, b) * V(m, nn);
            const FockOperator rhs =
                double(delta(a, nn)) * V(m, b) + double(delta(m, nn)) * V(a, b) - FockOperator(V(m, b) * V(a, nn));
            rep.composition = std::max(rep.composition, norm(FockOperator(lhs - rhs)));
            ++rep.identities_checked;
          }
        }
        const FockOperator& rho_a = V(a, a);
        const FockOperator& rho_b = V(b, b);
        const FockOperator lhs = V(a, b) * V(b, a);
        const FockOperator rhs = rho_b * FockOperator(ops.identity() - rho_a);
        const double r = norm(FockOperator(lhs - rhs));
        if (a == b) {
          rep.hop_back_diagonal = std::max(rep.hop_back_diagonal, r);
        } else {
          rep.hop_back = std::max(rep.hop_back, r);
          ++rep.identities_checked;
        }
      }
    }
  }
  return rep;
}

VertexMatrices vertex_matrices() {
  VertexMatrices m;
  m.v_up << 0, 0, 1, 1,
            0, 0, 1, 1,
            0, 0, 0, 0,
            0, 0, 0, 0;
  m.v_down << 0, 1, 0, 1,
              0, 0, 0, 0,
              0, 1, 0, 1,
              0, 0, 0, 0;
  m.rho_up = Eigen::Vector4d(1, 1, 0, 0).asDiagonal();
  m.rho_down = Eigen::Vector4d(1, 0, 1, 0).asDiagonal();
  return m;
}

}  // namespace bq::quiver
