#pragma once

// Periodic simplicial meshes of the torus [0,2pi)^d, d = 1 or 2.

#include "ridk/common.hpp"
#include "ridk/quadrature.hpp"

#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace ridk {

struct Element {
  /// Vertex coordinates in the element's own (unwrapped) chart. Intervals use
  /// the first two entries, triangles all three.
  std::array<Vec, 3> vertices;
  double measure = 0.0;
  double diameter = 0.0;
  /// Facet index and outward unit normal per local facet. For triangles local
  /// facet k is the edge opposite vertex k; for intervals 0 is the left end.
  std::array<int, 3> facets{-1, -1, -1};
  std::array<Vec, 3> normals;
};

/// A facet shared by two elements. Quantities are stored in the chart of the
/// minus element; adding `shift` maps a point into the plus element's chart.
struct Facet {
  int minus = -1;
  int plus = -1;
  int minus_local = -1;
  int plus_local = -1;
  Vec normal;  // unit, points from minus to plus
  double measure = 0.0;
  Vec a;  // endpoints in the minus chart (a == b in 1D)
  Vec b;
  Vec shift;
  /// Geometry-fixed orientation used by H(div) dofs; unaffected by flipping.
  Vec reference_normal;
};

class Mesh {
 public:
  int dimension() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const Element& element(int k) const { return elements_[static_cast<std::size_t>(k)]; }
  const Facet& facet(int f) const { return facets_[static_cast<std::size_t>(f)]; }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_facets() const { return static_cast<int>(facets_.size()); }
  int num_vertices() const { return dim_ == 1 ? nx_ : nx_ * ny_; }

  /// Element containing x and the image of x inside that element's chart.
  std::pair<int, Vec> locate(const Vec& x) const {
    const double hx = kTwoPi / nx_;
    const double px = wrap(x[0]);
    int i = std::min(nx_ - 1, static_cast<int>(px / hx));
    if (dim_ == 1) return {i, Vec(px, 0.0)};
    const double hy = kTwoPi / ny_;
    const double py = wrap(x[1]);
    int j = std::min(ny_ - 1, static_cast<int>(py / hy));
    const double s = (px - i * hx) / hx;
    const double t = (py - j * hy) / hy;
    const int cell = j * nx_ + i;
    return {s >= t ? 2 * cell : 2 * cell + 1, Vec(px, py)};
  }

  /// Maps a reference point (interval: s in [0,1]; triangle: barycentric-free
  /// (xi, eta)) of element k into its chart.
  Vec map_to_element(int k, const Vec& ref) const {
    const Element& e = element(k);
    if (dim_ == 1) return e.vertices[0] + (e.vertices[1] - e.vertices[0]) * ref[0];
    return e.vertices[0] + (e.vertices[1] - e.vertices[0]) * ref[0] +
           (e.vertices[2] - e.vertices[0]) * ref[1];
  }

  /// Volume quadrature on element k, exact for polynomials of degree `degree`.
  QuadratureRule element_rule(int k, int degree) const {
    QuadratureRule out;
    const Element& e = element(k);
    if (dim_ == 1) {
      for (const auto& [s, w] : gauss_legendre(std::max(1, (degree + 2) / 2))) {
        out.push_back({map_to_element(k, Vec(s, 0.0)), w * e.measure});
      }
      return out;
    }
    for (const auto& qp : reference_triangle_rule(degree)) {
      out.push_back({map_to_element(k, qp.point), 2.0 * qp.weight * e.measure});
    }
    return out;
  }

  /// Copy with every facet's minus/plus labels exchanged.
  Mesh flipped() const {
    Mesh m = *this;
    for (auto& f : m.facets_) {
      std::swap(f.minus, f.plus);
      std::swap(f.minus_local, f.plus_local);
      f.normal = -f.normal;
      f.a += f.shift;
      f.b += f.shift;
      f.shift = -f.shift;
    }
    return m;
  }

  static double wrap(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
  }

  friend Mesh build_interval(int n);
  friend Mesh build_torus2d(int nx, int ny);

 private:
  int dim_ = 1;
  int nx_ = 0;
  int ny_ = 1;
  double h_ = 0.0;
  std::vector<Element> elements_;
  std::vector<Facet> facets_;
};

/// Uniform periodic partition of [0,2pi) into n intervals. Facet k sits at
/// x = k*2pi/n.
inline Mesh build_interval(int n) {
  require(n >= 1, "build_interval: n must be >= 1");
  Mesh m;
  m.dim_ = 1;
  m.nx_ = n;
  m.ny_ = 1;
  const double hx = kTwoPi / n;
  m.h_ = hx;
  m.elements_.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Element& e = m.elements_[static_cast<std::size_t>(k)];
    e.vertices[0] = Vec(k * hx, 0.0);
    e.vertices[1] = Vec(k == n - 1 ? kTwoPi : (k + 1) * hx, 0.0);
    e.measure = e.vertices[1][0] - e.vertices[0][0];
    e.diameter = e.measure;
    e.normals[0] = Vec(-1.0, 0.0);
    e.normals[1] = Vec(1.0, 0.0);
    e.facets[0] = k;
    e.facets[1] = (k + 1) % n;
  }
  m.facets_.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Facet& f = m.facets_[static_cast<std::size_t>(k)];
    const int left = (k + n - 1) % n;
    const int right = k;
    f.measure = 1.0;
    f.reference_normal = Vec(1.0, 0.0);
    if (k == 0) {
      // Periodic seam: the lower index is the right-hand element 0.
      f.minus = 0;
      f.minus_local = 0;
      f.plus = left;
      f.plus_local = 1;
      f.normal = Vec(-1.0, 0.0);
      f.a = f.b = Vec(0.0, 0.0);
      f.shift = Vec(kTwoPi, 0.0);
    } else {
      f.minus = left;
      f.minus_local = 1;
      f.plus = right;
      f.plus_local = 0;
      f.normal = Vec(1.0, 0.0);
      f.a = f.b = m.elements_[static_cast<std::size_t>(right)].vertices[0];
      f.shift = Vec(0.0, 0.0);
    }
  }
  return m;
}

/// Structured nx-by-ny grid of the torus, each cell split along the diagonal
/// from its lower-left to its upper-right corner.
inline Mesh build_torus2d(int nx, int ny) {
  require(nx >= 2 && ny >= 2, "build_torus2d: nx and ny must be >= 2");
  Mesh m;
  m.dim_ = 2;
  m.nx_ = nx;
  m.ny_ = ny;
  const double hx = kTwoPi / nx;
  const double hy = kTwoPi / ny;
  auto vx = [&](int i) { return i == nx ? kTwoPi : i * hx; };
  auto vy = [&](int j) { return j == ny ? kTwoPi : j * hy; };
  m.elements_.resize(static_cast<std::size_t>(2 * nx * ny));
  double hmax = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec v00(vx(i), vy(j)), v10(vx(i + 1), vy(j)), v11(vx(i + 1), vy(j + 1)),
          v01(vx(i), vy(j + 1));
      const int cell = j * nx + i;
      Element& lower = m.elements_[static_cast<std::size_t>(2 * cell)];
      Element& upper = m.elements_[static_cast<std::size_t>(2 * cell + 1)];
      lower.vertices = {v00, v10, v11};
      upper.vertices = {v00, v11, v01};
      for (Element* e : {&lower, &upper}) {
        const Vec e1 = e->vertices[1] - e->vertices[0];
        const Vec e2 = e->vertices[2] - e->vertices[0];
        e->measure = 0.5 * std::abs(e1[0] * e2[1] - e1[1] * e2[0]);
        double diam = 0.0;
        for (int a = 0; a < 3; ++a) {
          const Vec p = e->vertices[static_cast<std::size_t>((a + 1) % 3)];
          const Vec q = e->vertices[static_cast<std::size_t>((a + 2) % 3)];
          const Vec o = e->vertices[static_cast<std::size_t>(a)];
          diam = std::max(diam, (q - p).norm());
          Vec n(q[1] - p[1], -(q[0] - p[0]));
          n.normalize();
          if (n.dot(o - p) > 0.0) n = -n;
          e->normals[static_cast<std::size_t>(a)] = n;
        }
        e->diameter = diam;
        hmax = std::max(hmax, diam);
      }
    }
  }
  m.h_ = hmax;

  // Pair up edges through a key on the wrapped midpoint.
  struct Side {
    int element;
    int local;
  };
  std::map<std::pair<long, long>, std::vector<Side>> edges;
  auto key = [&](const Vec& mid) {
    const double x = Mesh::wrap(mid[0]) / (0.5 * hx);
    const double y = Mesh::wrap(mid[1]) / (0.5 * hy);
    long kx = std::lround(x) % (2L * nx);
    long ky = std::lround(y) % (2L * ny);
    return std::make_pair(kx, ky);
  };
  for (int k = 0; k < m.num_elements(); ++k) {
    const Element& e = m.element(k);
    for (int a = 0; a < 3; ++a) {
      const Vec mid = 0.5 * (e.vertices[static_cast<std::size_t>((a + 1) % 3)] +
                             e.vertices[static_cast<std::size_t>((a + 2) % 3)]);
      edges[key(mid)].push_back({k, a});
    }
  }
  m.facets_.reserve(edges.size());
  for (auto& [k, sides] : edges) {
    if (sides.size() != 2) throw NumericalError("build_torus2d: inconsistent edge pairing");
    Side s0 = sides[0];
    Side s1 = sides[1];
    if (s1.element < s0.element) std::swap(s0, s1);
    const Element& em = m.element(s0.element);
    const Element& ep = m.element(s1.element);
    Facet f;
    f.minus = s0.element;
    f.minus_local = s0.local;
    f.plus = s1.element;
    f.plus_local = s1.local;
    f.a = em.vertices[static_cast<std::size_t>((s0.local + 1) % 3)];
    f.b = em.vertices[static_cast<std::size_t>((s0.local + 2) % 3)];
    f.measure = (f.b - f.a).norm();
    f.normal = em.normals[static_cast<std::size_t>(s0.local)];
    const Vec mid_m = 0.5 * (f.a + f.b);
    const Vec mid_p = 0.5 * (ep.vertices[static_cast<std::size_t>((s1.local + 1) % 3)] +
                             ep.vertices[static_cast<std::size_t>((s1.local + 2) % 3)]);
    f.shift = mid_p - mid_m;
    for (int c = 0; c < 2; ++c) f.shift[c] = kTwoPi * std::round(f.shift[c] / kTwoPi);
    // Reference orientation: +x for vertical edges, +y for horizontal ones,
    // (1,-1)/sqrt2-ish for the diagonals.
    Vec ref = f.normal;
    if (ref[0] < -1e-12 || (std::abs(ref[0]) <= 1e-12 && ref[1] < 0.0)) ref = -ref;
    f.reference_normal = ref;
    m.facets_.push_back(f);
  }
  for (int fi = 0; fi < m.num_facets(); ++fi) {
    const Facet& f = m.facets_[static_cast<std::size_t>(fi)];
    m.elements_[static_cast<std::size_t>(f.minus)].facets[static_cast<std::size_t>(f.minus_local)] = fi;
    m.elements_[static_cast<std::size_t>(f.plus)].facets[static_cast<std::size_t>(f.plus_local)] = fi;
  }
  return m;
}

/// Gauss rule on a facet with `order` points (exact to degree 2*order-1).
/// Points are in the minus element's chart; weights sum to the facet measure.
inline QuadratureRule facet_trace_points(const Mesh& mesh, int facet, int order) {
  require(order >= 1, "facet_trace_points: order must be >= 1");
  const Facet& f = mesh.facet(facet);
  if (mesh.dimension() == 1) return {{f.a, 1.0}};
  QuadratureRule out;
  for (const auto& [t, w] : gauss_legendre(order)) {
    out.push_back({f.a + (f.b - f.a) * t, w * f.measure});
  }
  return out;
}

}  // namespace ridk
