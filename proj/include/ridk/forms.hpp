#pragma once

// Wave-derived numerical fluxes, the discrete bilinear form a_h and the exact
// solution of the facet-normal Riemann problem.

#include "ridk/common.hpp"
#include "ridk/fespace.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <string>
#include <tuple>
#include <vector>

namespace ridk {

struct FluxValues {
  double h_rho;
  Vec h_j;
};

/// h_rho = {rho} + [[j]]/(2 sqrt(kBT)),  h_j = {j} + (sqrt(kBT)/2) [[rho]].
inline FluxValues numerical_flux(double rho_minus, double rho_plus, const Vec& j_minus, const Vec& j_plus,
                                 const Vec& n, double kbt) {
  require(kbt > 0.0, "numerical_flux: kBT must be positive");
  const double c = std::sqrt(kbt);
  const double jump_j = (j_minus - j_plus).dot(n);
  const Vec jump_rho = (rho_minus - rho_plus) * n;
  return {0.5 * (rho_minus + rho_plus) + jump_j / (2.0 * c), 0.5 * (j_minus + j_plus) + 0.5 * c * jump_rho};
}

struct RiemannState {
  double rho;
  double j;
};

/// Exact solution of rho_t = -j_x, j_t = -c^2 rho_x with a single jump at 0.
/// The right-moving characteristic carries (rho + j/c)/2 and the left-moving
/// one (rho - j/c)/2.
inline RiemannState riemann_solution(double rho_minus, double rho_plus, double j_minus, double j_plus, double c,
                                     double x, double t) {
  require(c > 0.0, "riemann_solution: c must be positive");
  require(t >= 0.0, "riemann_solution: t must be non-negative");
  if (x < -c * t) return {rho_minus, j_minus};
  if (x > c * t) return {rho_plus, j_plus};
  return {0.5 * (rho_minus + rho_plus) + (j_minus - j_plus) / (2.0 * c),
          0.5 * (j_minus + j_plus) + 0.5 * c * (rho_minus - rho_plus)};
}

/// kBT-free pieces of a_h. With block rows indexed by test functions,
///   a_h = [ -kBT^{3/2}/2 JJ   kBT RJ ]
///         [  kBT D            -gamma Mj ].
struct DiscreteOperator {
  Eigen::SparseMatrix<double> jj;  // sum_e int [[phi_a]].[[phi_b]]
  Eigen::SparseMatrix<double> rj;  // -sum_e int [[phi_a]].{psi_b} + (grad phi_a, psi_b)
  Eigen::SparseMatrix<double> d;   // (div psi_a, phi_b)
  Eigen::SparseMatrix<double> mj;  // (psi_a, psi_b)
  Eigen::SparseMatrix<double> mr;  // (phi_a, phi_b)

  int nr() const { return static_cast<int>(mr.rows()); }
  int nj() const { return static_cast<int>(mj.rows()); }

  Eigen::SparseMatrix<double> matrix(double kbt, double gamma) const;

  double apply(const StatePair& u, const StatePair& v, double kbt, double gamma) const {
    return v.rho.dot(-0.5 * std::pow(kbt, 1.5) * (jj * u.rho) + kbt * (rj * u.j)) +
           v.j.dot(kbt * (d * u.rho) - gamma * (mj * u.j));
  }
};

namespace detail {

inline void append_block(std::vector<Eigen::Triplet<double>>& out, const Eigen::SparseMatrix<double>& m,
                         int row0, int col0, double scale) {
  if (scale == 0.0) return;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      out.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()), scale * it.value());
}

inline Eigen::SparseMatrix<double> from_triplets(int rows, int cols, const std::vector<Eigen::Triplet<double>>& t) {
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace detail

/// Joins four blocks into one matrix over [rho; j] coefficients.
inline Eigen::SparseMatrix<double> block_matrix(const Eigen::SparseMatrix<double>& a, const Eigen::SparseMatrix<double>& b,
                                                const Eigen::SparseMatrix<double>& c, const Eigen::SparseMatrix<double>& e) {
  const int nr = static_cast<int>(a.rows());
  const int nj = static_cast<int>(e.rows());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() + b.nonZeros() + c.nonZeros() + e.nonZeros()));
  detail::append_block(t, a, 0, 0, 1.0);
  detail::append_block(t, b, 0, nr, 1.0);
  detail::append_block(t, c, nr, 0, 1.0);
  detail::append_block(t, e, nr, nr, 1.0);
  return detail::from_triplets(nr + nj, nr + nj, t);
}

inline Eigen::SparseMatrix<double> DiscreteOperator::matrix(double kbt, double gamma) const {
  const Eigen::SparseMatrix<double> a = (-0.5 * std::pow(kbt, 1.5)) * jj;
  const Eigen::SparseMatrix<double> b = kbt * rj;
  const Eigen::SparseMatrix<double> c = kbt * d;
  const Eigen::SparseMatrix<double> e = (-gamma) * mj;
  return block_matrix(a, b, c, e);
}

inline DiscreteOperator assemble_ah(const Discretization& disc) {
  const Mesh& mesh = disc.mesh();
  const ScalarSpaceDG& sr = disc.rho_space();
  const VectorSpaceHdiv& sj = disc.j_space();
  const int lr = sr.local_size();
  const int lj = sj.local_size();
  std::vector<Eigen::Triplet<double>> tjj, trj, td, tmj, tmr;

  for (int k = 0; k < mesh.num_elements(); ++k) {
    for (const auto& qp : mesh.element_rule(k, disc.volume_degree())) {
      double b[3], dv[4];
      Vec g[3], v[4];
      sr.eval(k, qp.point, b);
      sr.eval_grad(k, qp.point, g);
      sj.eval(k, qp.point, v);
      sj.eval_div(k, qp.point, dv);
      const double w = qp.weight;
      for (int a = 0; a < lr; ++a) {
        for (int c = 0; c < lr; ++c) tmr.emplace_back(sr.dof(k, a), sr.dof(k, c), w * b[a] * b[c]);
        for (int c = 0; c < lj; ++c) {
          trj.emplace_back(sr.dof(k, a), sj.dof(k, c), w * g[a].dot(v[c]));
          td.emplace_back(sj.dof(k, c), sr.dof(k, a), w * dv[c] * b[a]);
        }
      }
      for (int a = 0; a < lj; ++a)
        for (int c = 0; c < lj; ++c) tmj.emplace_back(sj.dof(k, a), sj.dof(k, c), w * v[a].dot(v[c]));
    }
  }

  for (int fi = 0; fi < mesh.num_facets(); ++fi) {
    const Facet& f = mesh.facet(fi);
    for (const auto& qp : facet_trace_points(mesh, fi, disc.facet_order())) {
      double bm[3], bp[3];
      Vec vm[4], vp[4];
      const Vec pp = qp.point + f.shift;
      sr.eval(f.minus, qp.point, bm);
      sr.eval(f.plus, pp, bp);
      sj.eval(f.minus, qp.point, vm);
      sj.eval(f.plus, pp, vp);
      // Scalar jump coefficients along n and half normal traces of psi.
      std::vector<std::pair<int, double>> jr;
      std::vector<std::pair<int, double>> av;
      for (int a = 0; a < lr; ++a) {
        jr.emplace_back(sr.dof(f.minus, a), bm[a]);
        jr.emplace_back(sr.dof(f.plus, a), -bp[a]);
      }
      for (int a = 0; a < lj; ++a) {
        av.emplace_back(sj.dof(f.minus, a), 0.5 * vm[a].dot(f.normal));
        av.emplace_back(sj.dof(f.plus, a), 0.5 * vp[a].dot(f.normal));
      }
      const double w = qp.weight;
      for (const auto& [ra, ja] : jr) {
        for (const auto& [rb, jb] : jr) tjj.emplace_back(ra, rb, w * ja * jb);
        for (const auto& [cb, vb] : av) trj.emplace_back(ra, cb, -w * ja * vb);
      }
    }
  }

  const int nr = sr.num_dofs();
  const int nj = sj.num_dofs();
  DiscreteOperator op;
  op.jj = detail::from_triplets(nr, nr, tjj);
  op.rj = detail::from_triplets(nr, nj, trj);
  op.d = detail::from_triplets(nj, nr, td);
  op.mj = detail::from_triplets(nj, nj, tmj);
  op.mr = detail::from_triplets(nr, nr, tmr);
  op.jj.prune(0.0);
  op.rj.prune(0.0);
  op.d.prune(0.0);
  return op;
}

/// Symmetric interior penalty Laplacian on the scalar space with penalty
/// 4(q+1)^2/h.
inline Eigen::SparseMatrix<double> assemble_sip(const Discretization& disc) {
  const Mesh& mesh = disc.mesh();
  const ScalarSpaceDG& sr = disc.rho_space();
  const int lr = sr.local_size();
  const double q1 = disc.order() + 1.0;
  const double eta = 4.0 * q1 * q1 / mesh.h();
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    for (const auto& qp : mesh.element_rule(k, disc.volume_degree())) {
      Vec g[3];
      sr.eval_grad(k, qp.point, g);
      for (int a = 0; a < lr; ++a)
        for (int c = 0; c < lr; ++c) t.emplace_back(sr.dof(k, a), sr.dof(k, c), qp.weight * g[a].dot(g[c]));
    }
  }
  for (int fi = 0; fi < mesh.num_facets(); ++fi) {
    const Facet& f = mesh.facet(fi);
    for (const auto& qp : facet_trace_points(mesh, fi, disc.facet_order())) {
      double bm[3], bp[3];
      Vec gm[3], gp[3];
      const Vec pp = qp.point + f.shift;
      sr.eval(f.minus, qp.point, bm);
      sr.eval(f.plus, pp, bp);
      sr.eval_grad(f.minus, qp.point, gm);
      sr.eval_grad(f.plus, pp, gp);
      std::vector<std::tuple<int, double, double>> dofs;  // dof, jump coefficient, average normal derivative
      for (int a = 0; a < lr; ++a) {
        dofs.emplace_back(sr.dof(f.minus, a), bm[a], 0.5 * gm[a].dot(f.normal));
        dofs.emplace_back(sr.dof(f.plus, a), -bp[a], 0.5 * gp[a].dot(f.normal));
      }
      const double w = qp.weight;
      for (const auto& [ra, ja, da] : dofs)
        for (const auto& [rb, jb, db] : dofs) t.emplace_back(ra, rb, w * (-da * jb - db * ja + eta * ja * jb));
    }
  }
  Eigen::SparseMatrix<double> s = detail::from_triplets(sr.num_dofs(), sr.num_dofs(), t);
  s.prune(0.0);
  return s;
}

/// a_h(z, v_i) for every basis pair v_i, with z given pointwise and assumed
/// continuous across facets.
inline StatePair ah_load(const Discretization& disc, const PointPair& z, double kbt, double gamma) {
  const Mesh& mesh = disc.mesh();
  const ScalarSpaceDG& sr = disc.rho_space();
  const VectorSpaceHdiv& sj = disc.j_space();
  StatePair out{Eigen::VectorXd::Zero(sr.num_dofs()), Eigen::VectorXd::Zero(sj.num_dofs())};
  const int extra = 6;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    for (const auto& qp : mesh.element_rule(k, disc.volume_degree() + extra)) {
      const auto [r, jv] = z(qp.point);
      double dv[4];
      Vec g[3], v[4];
      sr.eval_grad(k, qp.point, g);
      sj.eval(k, qp.point, v);
      sj.eval_div(k, qp.point, dv);
      for (int a = 0; a < sr.local_size(); ++a) out.rho[sr.dof(k, a)] += qp.weight * kbt * g[a].dot(jv);
      for (int a = 0; a < sj.local_size(); ++a)
        out.j[sj.dof(k, a)] += qp.weight * (kbt * dv[a] * r - gamma * v[a].dot(jv));
    }
  }
  for (int fi = 0; fi < mesh.num_facets(); ++fi) {
    const Facet& f = mesh.facet(fi);
    for (const auto& qp : facet_trace_points(mesh, fi, disc.facet_order() + extra / 2)) {
      const auto [rm, jm] = z(qp.point);
      const auto [rp, jp] = z(qp.point + f.shift);
      const FluxValues fl = numerical_flux(rm, rp, jm, jp, f.normal, kbt);
      double bm[3], bp[3];
      sr.eval(f.minus, qp.point, bm);
      sr.eval(f.plus, qp.point + f.shift, bp);
      const double hn = fl.h_j.dot(f.normal);
      for (int a = 0; a < sr.local_size(); ++a) {
        out.rho[sr.dof(f.minus, a)] -= qp.weight * kbt * bm[a] * hn;
        out.rho[sr.dof(f.plus, a)] += qp.weight * kbt * bp[a] * hn;
      }
    }
  }
  return out;
}

/// Column vector of integrals of the scalar basis functions.
inline Eigen::VectorXd scalar_basis_integrals(const Discretization& disc) {
  const ScalarSpaceDG& sr = disc.rho_space();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(sr.num_dofs());
  for (int k = 0; k < disc.mesh().num_elements(); ++k) {
    for (const auto& qp : disc.mesh().element_rule(k, disc.order())) {
      double b[3];
      sr.eval(k, qp.point, b);
      for (int a = 0; a < sr.local_size(); ++a) m[sr.dof(k, a)] += qp.weight * b[a];
    }
  }
  return m;
}

/// Ritz-Galerkin projection: a_h(R z, v) = a_h(z, v) for all v with the mass
/// of R z pinned to that of z through one Lagrange multiplier.
inline StatePair ritz_project(const Discretization& disc, const DiscreteOperator& op, const PointPair& z, double kbt,
                              double gamma) {
  require(kbt > 0.0, "ritz_project: kBT must be positive");
  const int nr = op.nr();
  const int nj = op.nj();
  const int n = nr + nj;
  const Eigen::SparseMatrix<double> a = op.matrix(kbt, gamma);
  const Eigen::VectorXd m = scalar_basis_integrals(disc);
  std::vector<Eigen::Triplet<double>> t;
  detail::append_block(t, a, 0, 0, 1.0);
  for (int i = 0; i < nr; ++i) {
    t.emplace_back(i, n, m[i]);
    t.emplace_back(n, i, m[i]);
  }
  const Eigen::SparseMatrix<double> big = detail::from_triplets(n + 1, n + 1, t);

  const StatePair load = ah_load(disc, z, kbt, gamma);
  double mass = 0.0;
  for (int k = 0; k < disc.mesh().num_elements(); ++k)
    for (const auto& qp : disc.mesh().element_rule(k, disc.volume_degree() + 6)) mass += qp.weight * z(qp.point).first;
  Eigen::VectorXd rhs(n + 1);
  rhs << load.rho, load.j, mass;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(big);
  if (lu.info() != Eigen::Success) throw NumericalError("ritz_project: factorization failed");
  const Eigen::VectorXd x = lu.solve(rhs);
  const double res = (big * x - rhs).norm();
  if (!std::isfinite(res) || res > 1e-8 * std::max(1.0, rhs.norm())) {
    throw NumericalError("ritz_project: solve failed, residual " + std::to_string(res));
  }
  return {x.head(nr), x.segment(nr, nj)};
}

}  // namespace ridk
