#pragma once

#include "ridk/common.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ridk {

struct QuadraturePoint {
  Vec point;
  double weight;
};

using QuadratureRule = std::vector<QuadraturePoint>;

/// Gauss-Legendre nodes and weights on [0,1]; exact for degree 2m-1.
inline std::vector<std::pair<double, double>> gauss_legendre(int m) {
  require(m >= 1, "gauss_legendre: need at least one point");
  std::vector<std::pair<double, double>> rule(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    // Newton iteration on P_m from the Chebyshev guess.
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pm = (m == 1) ? x : p1;
      const double pm1 = (m == 1) ? 1.0 : p0;
      dp = m * (x * pm - pm1) / (x * x - 1.0);
      const double dx = pm / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[static_cast<std::size_t>(i)] = {0.5 * (1.0 - x), 0.5 * w};
  }
  return rule;
}

/// Collapsed Gauss rule on the reference triangle (0,0),(1,0),(0,1).
/// Exact for polynomials of total degree <= `degree`; weights sum to 1/2.
inline QuadratureRule reference_triangle_rule(int degree) {
  const int m = std::max(1, (degree + 2) / 2);
  const auto g = gauss_legendre(m);
  const auto gu = gauss_legendre(m + 1);  // extra point for the (1-u) Jacobian
  QuadratureRule rule;
  rule.reserve(g.size() * gu.size());
  for (const auto& [u, wu] : gu) {
    for (const auto& [v, wv] : g) {
      rule.push_back({Vec(u, v * (1.0 - u)), wu * wv * (1.0 - u)});
    }
  }
  return rule;
}

}  // namespace ridk
