#pragma once

// DG(q) scalar spaces, H(div)-conforming vector spaces, fields and the
// projections between pointwise data and discrete pairs.

#include "ridk/common.hpp"
#include "ridk/mesh.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <vector>

namespace ridk {

namespace detail {

/// Lagrange basis on [0,1] with the given nodes: values and s-derivatives.
inline void lagrange_eval(const std::vector<double>& nodes, double s, double* val, double* der) {
  const std::size_t m = nodes.size();
  for (std::size_t i = 0; i < m; ++i) {
    double v = 1.0;
    double d = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i) continue;
      const double den = nodes[i] - nodes[k];
      double term = 1.0 / den;
      for (std::size_t l = 0; l < m; ++l) {
        if (l == i || l == k) continue;
        term *= (s - nodes[l]) / (nodes[i] - nodes[l]);
      }
      d += term;
      v *= (s - nodes[k]) / den;
    }
    if (val) val[i] = v;
    if (der) der[i] = d;
  }
}

inline std::vector<double> equispaced_nodes(int q) {
  if (q == 0) return {0.5};
  std::vector<double> out;
  for (int i = 0; i <= q; ++i) out.push_back(static_cast<double>(i) / q);
  return out;
}

}  // namespace detail

/// Discontinuous piecewise polynomials of degree q. In two dimensions only
/// q = 0 is available.
class ScalarSpaceDG {
 public:
  ScalarSpaceDG(const Mesh& mesh, int q) : mesh_(&mesh), q_(q) {
    require(q >= 0, "ScalarSpaceDG: q must be >= 0");
    if (mesh.dimension() == 1) {
      require(q <= 2, "ScalarSpaceDG: 1D order limited to q <= 2");
      nodes_ = detail::equispaced_nodes(q);
    } else {
      require(q == 0, "ScalarSpaceDG: 2D spaces are lowest order only");
      nodes_ = {0.0};
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  int order() const { return q_; }
  int local_size() const { return static_cast<int>(nodes_.size()); }
  int num_dofs() const { return mesh_->num_elements() * local_size(); }
  int dof(int k, int i) const { return k * local_size() + i; }

  /// Local basis values at a point of element k's chart.
  void eval(int k, const Vec& x, double* values) const {
    if (mesh_->dimension() == 2) {
      values[0] = 1.0;
      return;
    }
    detail::lagrange_eval(nodes_, ref(k, x), values, nullptr);
  }

  /// Local basis gradients (first component only in 1D).
  void eval_grad(int k, const Vec& x, Vec* grads) const {
    if (mesh_->dimension() == 2) {
      grads[0] = Vec::Zero();
      return;
    }
    double der[3];
    detail::lagrange_eval(nodes_, ref(k, x), nullptr, der);
    const double inv = 1.0 / mesh_->element(k).measure;
    for (int i = 0; i < local_size(); ++i) grads[i] = Vec(der[i] * inv, 0.0);
  }

  /// Interpolation nodes of element k in its chart.
  std::vector<Vec> nodes(int k) const {
    const Element& e = mesh_->element(k);
    if (mesh_->dimension() == 2) return {(e.vertices[0] + e.vertices[1] + e.vertices[2]) / 3.0};
    std::vector<Vec> out;
    for (double s : nodes_) out.push_back(mesh_->map_to_element(k, Vec(s, 0.0)));
    return out;
  }

 private:
  double ref(int k, const Vec& x) const {
    const Element& e = mesh_->element(k);
    return (x[0] - e.vertices[0][0]) / e.measure;
  }

  const Mesh* mesh_;
  int q_;
  std::vector<double> nodes_;
};

/// Normal-continuous vector space paired with DG(q): periodic continuous
/// Lagrange of degree q+1 on intervals, lowest-order Raviart-Thomas on
/// triangles.
class VectorSpaceHdiv {
 public:
  VectorSpaceHdiv(const Mesh& mesh, int q) : mesh_(&mesh), q_(q) {
    require(q >= 0, "VectorSpaceHdiv: q must be >= 0");
    if (mesh.dimension() == 1) {
      require(q <= 2, "VectorSpaceHdiv: 1D order limited to q <= 2");
      // Vertex nodes first, then interior nodes in increasing position.
      nodes_ = {0.0, 1.0};
      for (int i = 1; i <= q; ++i) nodes_.push_back(static_cast<double>(i) / (q + 1));
    } else {
      require(q == 0, "VectorSpaceHdiv: 2D spaces are lowest order only");
      signs_.resize(static_cast<std::size_t>(mesh.num_elements()));
      for (int k = 0; k < mesh.num_elements(); ++k) {
        const Element& e = mesh.element(k);
        for (int a = 0; a < 3; ++a) {
          const Facet& f = mesh.facet(e.facets[static_cast<std::size_t>(a)]);
          signs_[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)] =
              e.normals[static_cast<std::size_t>(a)].dot(f.reference_normal) > 0.0 ? 1.0 : -1.0;
        }
      }
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  int order() const { return q_; }
  int local_size() const { return mesh_->dimension() == 1 ? q_ + 2 : 3; }
  int num_dofs() const {
    return mesh_->dimension() == 1 ? mesh_->num_elements() * (q_ + 1) : mesh_->num_facets();
  }

  int dof(int k, int i) const {
    if (mesh_->dimension() == 2) return mesh_->element(k).facets[static_cast<std::size_t>(i)];
    const int n = mesh_->num_elements();
    if (i == 0) return k;
    if (i == 1) return (k + 1) % n;
    return n + k * q_ + (i - 2);
  }

  void eval(int k, const Vec& x, Vec* values) const {
    const Element& e = mesh_->element(k);
    if (mesh_->dimension() == 1) {
      double v[4];
      detail::lagrange_eval(nodes_, (x[0] - e.vertices[0][0]) / e.measure, v, nullptr);
      for (int i = 0; i < local_size(); ++i) values[i] = Vec(v[i], 0.0);
      return;
    }
    const auto& s = signs_[static_cast<std::size_t>(k)];
    for (int i = 0; i < 3; ++i) {
      values[i] = s[static_cast<std::size_t>(i)] * (x - e.vertices[static_cast<std::size_t>(i)]) /
                  (2.0 * e.measure);
    }
  }

  void eval_div(int k, const Vec& x, double* div) const {
    const Element& e = mesh_->element(k);
    if (mesh_->dimension() == 1) {
      double d[4];
      detail::lagrange_eval(nodes_, (x[0] - e.vertices[0][0]) / e.measure, nullptr, d);
      for (int i = 0; i < local_size(); ++i) div[i] = d[i] / e.measure;
      return;
    }
    const auto& s = signs_[static_cast<std::size_t>(k)];
    for (int i = 0; i < 3; ++i) div[i] = s[static_cast<std::size_t>(i)] / e.measure;
  }

  /// Degrees of freedom of a pointwise vector function: nodal values in 1D,
  /// normal fluxes through each facet in 2D.
  Eigen::VectorXd interpolate(const std::function<Vec(const Vec&)>& f) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(num_dofs());
    if (mesh_->dimension() == 1) {
      for (int k = 0; k < mesh_->num_elements(); ++k) {
        for (int i = 0; i < local_size(); ++i) {
          const Vec x = mesh_->map_to_element(k, Vec(nodes_[static_cast<std::size_t>(i)], 0.0));
          c[dof(k, i)] = checked(f(x)[0]);
        }
      }
      return c;
    }
    for (int fi = 0; fi < mesh_->num_facets(); ++fi) {
      const Facet& fc = mesh_->facet(fi);
      double acc = 0.0;
      for (const auto& qp : facet_trace_points(*mesh_, fi, 4)) {
        acc += qp.weight * f(qp.point).dot(fc.reference_normal);
      }
      c[fi] = checked(acc);
    }
    return c;
  }

 private:
  static double checked(double v) {
    require(std::isfinite(v), "interpolate: non-finite function value");
    return v;
  }

  const Mesh* mesh_;
  int q_;
  std::vector<double> nodes_;
  std::vector<std::array<double, 3>> signs_;
};

/// Mesh plus the paired spaces. Non-copyable so the spaces may point at the
/// mesh member.
class Discretization {
 public:
  Discretization(Mesh mesh, int q) : mesh_(std::move(mesh)), rho_(mesh_, q), j_(mesh_, q) {}
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const Mesh& mesh() const { return mesh_; }
  const ScalarSpaceDG& rho_space() const { return rho_; }
  const VectorSpaceHdiv& j_space() const { return j_; }
  int order() const { return rho_.order(); }
  int dimension() const { return mesh_.dimension(); }
  int volume_degree() const { return 2 * order() + 2; }
  int facet_order() const { return order() + 2; }
  double domain_measure() const { return std::pow(kTwoPi, dimension()); }

 private:
  Mesh mesh_;
  ScalarSpaceDG rho_;
  VectorSpaceHdiv j_;
};

inline std::shared_ptr<const Discretization> make_discretization(Mesh mesh, int q) {
  return std::make_shared<const Discretization>(std::move(mesh), q);
}

/// Coefficients of a discrete pair (rho_h, j_h).
struct StatePair {
  Eigen::VectorXd rho;
  Eigen::VectorXd j;
};

/// Pointwise data for projections: returns (rho, j) at a point.
using PointPair = std::function<std::pair<double, Vec>(const Vec&)>;

inline double eval_scalar(const Discretization& d, const Eigen::VectorXd& c, int k, const Vec& x) {
  double b[3];
  d.rho_space().eval(k, x, b);
  double v = 0.0;
  for (int i = 0; i < d.rho_space().local_size(); ++i) v += b[i] * c[d.rho_space().dof(k, i)];
  return v;
}

inline Vec eval_vector(const Discretization& d, const Eigen::VectorXd& c, int k, const Vec& x) {
  Vec b[4];
  d.j_space().eval(k, x, b);
  Vec v = Vec::Zero();
  for (int i = 0; i < d.j_space().local_size(); ++i) v += b[i] * c[d.j_space().dof(k, i)];
  return v;
}

inline double eval_divergence(const Discretization& d, const Eigen::VectorXd& c, int k, const Vec& x) {
  double b[4];
  d.j_space().eval_div(k, x, b);
  double v = 0.0;
  for (int i = 0; i < d.j_space().local_size(); ++i) v += b[i] * c[d.j_space().dof(k, i)];
  return v;
}

/// Evaluates a scalar field at an arbitrary point of the torus.
inline double eval_scalar_at(const Discretization& d, const Eigen::VectorXd& c, const Vec& x) {
  const auto [k, y] = d.mesh().locate(x);
  return eval_scalar(d, c, k, y);
}

inline Vec eval_vector_at(const Discretization& d, const Eigen::VectorXd& c, const Vec& x) {
  const auto [k, y] = d.mesh().locate(x);
  return eval_vector(d, c, k, y);
}

inline Eigen::VectorXd interpolate_scalar(const Discretization& d,
                                          const std::function<double(const Vec&)>& f) {
  const ScalarSpaceDG& s = d.rho_space();
  Eigen::VectorXd c(s.num_dofs());
  for (int k = 0; k < d.mesh().num_elements(); ++k) {
    const auto nodes = s.nodes(k);
    for (int i = 0; i < s.local_size(); ++i) {
      const double v = f(nodes[static_cast<std::size_t>(i)]);
      require(std::isfinite(v), "interpolate: non-finite function value");
      c[s.dof(k, i)] = v;
    }
  }
  return c;
}

inline Eigen::VectorXd interpolate_vector(const Discretization& d,
                                          const std::function<Vec(const Vec&)>& f) {
  return d.j_space().interpolate(f);
}

inline StatePair interpolate(const Discretization& d, const PointPair& z) {
  return {interpolate_scalar(d, [&](const Vec& x) { return z(x).first; }),
          interpolate_vector(d, [&](const Vec& x) { return z(x).second; })};
}

inline double total_mass(const Discretization& d, const Eigen::VectorXd& rho) {
  double m = 0.0;
  for (int k = 0; k < d.mesh().num_elements(); ++k) {
    for (const auto& qp : d.mesh().element_rule(k, d.order())) {
      m += qp.weight * eval_scalar(d, rho, k, qp.point);
    }
  }
  return m;
}

/// Shifts rho by a constant so that it carries mass m.
inline Eigen::VectorXd mass_correct(const Discretization& d, const Eigen::VectorXd& rho, double m) {
  const double shift = (m - total_mass(d, rho)) / d.domain_measure();
  return (rho.array() + shift).matrix();
}

/// Mass matrices of both spaces.
struct MassMatrices {
  Eigen::SparseMatrix<double> rho;
  Eigen::SparseMatrix<double> j;
};

inline MassMatrices assemble_mass(const Discretization& d) {
  const ScalarSpaceDG& sr = d.rho_space();
  const VectorSpaceHdiv& sj = d.j_space();
  std::vector<Eigen::Triplet<double>> tr, tj;
  const int nr = sr.local_size();
  const int nj = sj.local_size();
  for (int k = 0; k < d.mesh().num_elements(); ++k) {
    for (const auto& qp : d.mesh().element_rule(k, d.volume_degree())) {
      double b[3];
      Vec v[4];
      sr.eval(k, qp.point, b);
      sj.eval(k, qp.point, v);
      for (int a = 0; a < nr; ++a)
        for (int c = 0; c < nr; ++c) tr.emplace_back(sr.dof(k, a), sr.dof(k, c), qp.weight * b[a] * b[c]);
      for (int a = 0; a < nj; ++a)
        for (int c = 0; c < nj; ++c)
          tj.emplace_back(sj.dof(k, a), sj.dof(k, c), qp.weight * v[a].dot(v[c]));
    }
  }
  MassMatrices m;
  m.rho.resize(sr.num_dofs(), sr.num_dofs());
  m.j.resize(sj.num_dofs(), sj.num_dofs());
  m.rho.setFromTriplets(tr.begin(), tr.end());
  m.j.setFromTriplets(tj.begin(), tj.end());
  return m;
}

/// kBT (rho_u, rho_v) + (j_u, j_v).
inline double weighted_inner(const MassMatrices& m, const StatePair& u, const StatePair& v, double kbt) {
  require(kbt > 0.0, "weighted_inner: kBT must be positive");
  return kbt * u.rho.dot(m.rho * v.rho) + u.j.dot(m.j * v.j);
}

inline double weighted_inner(const Discretization& d, const StatePair& u, const StatePair& v, double kbt) {
  return weighted_inner(assemble_mass(d), u, v, kbt);
}

/// Right-hand sides (z, basis) of both blocks for pointwise data z.
inline StatePair load_vectors(const Discretization& d, const PointPair& z, int extra_degree = 4) {
  const ScalarSpaceDG& sr = d.rho_space();
  const VectorSpaceHdiv& sj = d.j_space();
  StatePair out{Eigen::VectorXd::Zero(sr.num_dofs()), Eigen::VectorXd::Zero(sj.num_dofs())};
  for (int k = 0; k < d.mesh().num_elements(); ++k) {
    for (const auto& qp : d.mesh().element_rule(k, d.volume_degree() + extra_degree)) {
      const auto [r, jv] = z(qp.point);
      double b[3];
      Vec v[4];
      sr.eval(k, qp.point, b);
      sj.eval(k, qp.point, v);
      for (int a = 0; a < sr.local_size(); ++a) out.rho[sr.dof(k, a)] += qp.weight * r * b[a];
      for (int a = 0; a < sj.local_size(); ++a) out.j[sj.dof(k, a)] += qp.weight * jv.dot(v[a]);
    }
  }
  return out;
}

/// Orthogonal projection onto the discrete pair space in the weighted inner
/// product. The weight only scales the rho block, so it drops out.
inline StatePair l2_project(const Discretization& d, const PointPair& z) {
  const MassMatrices m = assemble_mass(d);
  const StatePair b = load_vectors(d, z);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> sr(m.rho), sj(m.j);
  if (sr.info() != Eigen::Success || sj.info() != Eigen::Success) {
    throw NumericalError("l2_project: singular mass matrix");
  }
  return {sr.solve(b.rho), sj.solve(b.j)};
}

/// Trace pair of a scalar field at a facet point p given in the minus chart.
inline std::pair<double, double> scalar_traces(const Discretization& d, const Eigen::VectorXd& c,
                                               int facet, const Vec& p) {
  const Facet& f = d.mesh().facet(facet);
  return {eval_scalar(d, c, f.minus, p), eval_scalar(d, c, f.plus, p + f.shift)};
}

inline std::pair<Vec, Vec> vector_traces(const Discretization& d, const Eigen::VectorXd& c, int facet,
                                         const Vec& p) {
  const Facet& f = d.mesh().facet(facet);
  return {eval_vector(d, c, f.minus, p), eval_vector(d, c, f.plus, p + f.shift)};
}

struct ScalarTrace {
  double average;
  Vec jump;
};

struct VectorTrace {
  Vec average;
  double jump;
};

/// Average and jump of a scalar field at each trace node of a facet.
inline std::vector<ScalarTrace> jump_average_scalar(const Discretization& d, const Eigen::VectorXd& c,
                                                    int facet) {
  const Facet& f = d.mesh().facet(facet);
  std::vector<ScalarTrace> out;
  for (const auto& qp : facet_trace_points(d.mesh(), facet, d.facet_order())) {
    const auto [m, p] = scalar_traces(d, c, facet, qp.point);
    out.push_back({0.5 * (m + p), (m - p) * f.normal});
  }
  return out;
}

inline std::vector<VectorTrace> jump_average_vector(const Discretization& d, const Eigen::VectorXd& c,
                                                    int facet) {
  const Facet& f = d.mesh().facet(facet);
  std::vector<VectorTrace> out;
  for (const auto& qp : facet_trace_points(d.mesh(), facet, d.facet_order())) {
    const auto [m, p] = vector_traces(d, c, facet, qp.point);
    out.push_back({0.5 * (m + p), (m - p).dot(f.normal)});
  }
  return out;
}

/// L2 norm of rho_h - f over the torus.
inline double l2_error_scalar(const Discretization& d, const Eigen::VectorXd& c,
                              const std::function<double(const Vec&)>& f, int extra_degree = 6) {
  double acc = 0.0;
  for (int k = 0; k < d.mesh().num_elements(); ++k) {
    for (const auto& qp : d.mesh().element_rule(k, d.volume_degree() + extra_degree)) {
      const double e = eval_scalar(d, c, k, qp.point) - f(qp.point);
      acc += qp.weight * e * e;
    }
  }
  return std::sqrt(acc);
}

inline double l2_error_vector(const Discretization& d, const Eigen::VectorXd& c,
                              const std::function<Vec(const Vec&)>& f, int extra_degree = 6) {
  double acc = 0.0;
  for (int k = 0; k < d.mesh().num_elements(); ++k) {
    for (const auto& qp : d.mesh().element_rule(k, d.volume_degree() + extra_degree)) {
      acc += qp.weight * (eval_vector(d, c, k, qp.point) - f(qp.point)).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

}  // namespace ridk
