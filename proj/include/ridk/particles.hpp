#pragma once

// Langevin particles on the torus with A + B -> 2B reactions, and their
// kernel-smoothed empirical densities.

#include "ridk/common.hpp"
#include "ridk/mesh.hpp"
#include "ridk/noise.hpp"
#include "ridk/potential.hpp"
#include "ridk/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace ridk {

enum class Species : std::uint8_t { A = 0, B = 1 };

struct ParticleSystem {
  int dimension = 1;
  std::vector<Vec> q;
  std::vector<Vec> p;
  std::vector<Species> type;

  int size() const { return static_cast<int>(q.size()); }
  int count(Species s) const {
    int c = 0;
    for (Species t : type) c += t == s;
    return c;
  }
};

struct ReactionParams {
  double kappa = 0.0;
  double radius = 0.15;

  void validate() const {
    require(kappa >= 0.0, "reaction rate must be non-negative");
    require(radius > 0.0 && radius < kPi, "reaction radius must lie in (0, pi)");
  }
};

/// Componentwise minimum-image difference a - b on the torus.
inline Vec periodic_difference(const Vec& a, const Vec& b, int d) {
  Vec r = Vec::Zero();
  for (int l = 0; l < d; ++l) {
    double x = std::fmod(a[l] - b[l], kTwoPi);
    if (x > kPi) x -= kTwoPi;
    if (x < -kPi) x += kTwoPi;
    r[l] = x;
  }
  return r;
}

inline double periodic_distance(const Vec& a, const Vec& b, int d) { return periodic_difference(a, b, d).norm(); }

/// Euler-Maruyama: q' = q + p dt, p' = p - (gamma p + grad V(q)) dt + sigma sqrt(dt) xi.
inline void langevin_step(ParticleSystem& s, double gamma, double sigma, const Potential& v, double dt,
                          std::uint64_t seed, std::uint64_t step) {
  require(dt > 0.0, "langevin_step: dt must be positive");
  const bool force = !v.is_zero_gradient();
  const double kick = sigma * std::sqrt(dt);
  for (int i = 0; i < s.size(); ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    const Vec q = s.q[ii], p = s.p[ii];
    Vec dp = -gamma * p * dt;
    if (force) dp -= v.gradient(q) * dt;
    if (sigma > 0.0) {
      const auto z = normal_pair(seed, make_counter(step, 0, static_cast<std::uint32_t>(i), Stream::langevin));
      for (int l = 0; l < s.dimension; ++l) dp[l] += kick * z[static_cast<std::size_t>(l)];
    }
    Vec qn = q + p * dt;
    for (int l = 0; l < s.dimension; ++l) qn[l] = Mesh::wrap(qn[l]);
    s.q[ii] = qn;
    s.p[ii] = p + dp;
  }
}

/// Uniform cell lists over [0, 2pi)^d with cells no smaller than r.
class CellList {
 public:
  CellList(const ParticleSystem& s, double r) : d_(s.dimension) {
    m_ = std::max(1, static_cast<int>(std::floor(kTwoPi / r)));
    const int ncell = d_ == 1 ? m_ : m_ * m_;
    head_.assign(static_cast<std::size_t>(ncell), -1);
    next_.assign(static_cast<std::size_t>(s.size()), -1);
    for (int i = s.size() - 1; i >= 0; --i) {
      const int c = cell_of(s.q[static_cast<std::size_t>(i)]);
      next_[static_cast<std::size_t>(i)] = head_[static_cast<std::size_t>(c)];
      head_[static_cast<std::size_t>(c)] = i;
    }
  }

  /// Calls f(j) for every particle in the cells adjacent to x (each once).
  template <class F>
  void for_neighbours(const Vec& x, F&& f) const {
    const int cx = coord(x[0]);
    const int cy = d_ == 2 ? coord(x[1]) : 0;
    auto visit = [&](int c) {
      for (int j = head_[static_cast<std::size_t>(c)]; j >= 0; j = next_[static_cast<std::size_t>(j)]) f(j);
    };
    if (m_ < 3) {
      // Every cell is a neighbour when there are fewer than three per axis.
      const int ncell = d_ == 1 ? m_ : m_ * m_;
      for (int c = 0; c < ncell; ++c) visit(c);
      return;
    }
    for (int dx = -1; dx <= 1; ++dx) {
      const int ix = (cx + dx + m_) % m_;
      if (d_ == 1) {
        visit(ix);
        continue;
      }
      for (int dy = -1; dy <= 1; ++dy) visit(ix * m_ + (cy + dy + m_) % m_);
    }
  }

 private:
  int coord(double x) const { return std::min(m_ - 1, static_cast<int>(Mesh::wrap(x) / kTwoPi * m_)); }
  int cell_of(const Vec& x) const { return d_ == 1 ? coord(x[0]) : coord(x[0]) * m_ + coord(x[1]); }

  int d_;
  int m_;
  std::vector<int> head_;
  std::vector<int> next_;
};

/// For each A particle: whether some B particle lies within distance r.
inline std::vector<bool> reaction_candidates(const ParticleSystem& s, double r) {
  std::vector<bool> out(static_cast<std::size_t>(s.size()), false);
  const CellList cells(s, r);
  for (int i = 0; i < s.size(); ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    if (s.type[ii] != Species::A) continue;
    bool hit = false;
    cells.for_neighbours(s.q[ii], [&](int j) {
      if (hit) return;
      const std::size_t jj = static_cast<std::size_t>(j);
      if (s.type[jj] == Species::B && periodic_distance(s.q[ii], s.q[jj], s.dimension) <= r) hit = true;
    });
    out[ii] = hit;
  }
  return out;
}

/// Per-particle uniforms of one reaction pass.
inline std::vector<double> reaction_draws(int n, std::uint64_t seed, std::uint64_t step) {
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    u[static_cast<std::size_t>(i)] =
        uniform_pair(seed, make_counter(step, 0, static_cast<std::uint32_t>(i), Stream::reaction))[0];
  return u;
}

/// Flips each candidate A with u_i < 1 - exp(-kappa dt). Returns the number of flips.
inline int apply_flips(ParticleSystem& s, const std::vector<bool>& candidates, const std::vector<double>& u,
                       double kappa, double dt) {
  const double prob = -std::expm1(-kappa * dt);
  int flips = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] && u[i] < prob) {
      s.type[i] = Species::B;
      ++flips;
    }
  }
  return flips;
}

/// One reaction pass; neighbourhoods are taken from the configuration before any flip.
inline int react(ParticleSystem& s, const ReactionParams& params, double dt, std::uint64_t seed, std::uint64_t step) {
  require(dt > 0.0, "react: dt must be positive");
  params.validate();
  if (params.kappa == 0.0) return 0;
  return apply_flips(s, reaction_candidates(s, params.radius), reaction_draws(s.size(), seed, step), params.kappa, dt);
}

struct DensitySample {
  std::vector<double> rho;
  std::vector<Vec> j;
};

/// rho_eps(x) = N^{-1} sum_i w_eps(x - q_i), j_eps likewise with weights p_i,
/// restricted to one species when `only` is set. N is the full system size.
inline DensitySample empirical_density(const ParticleSystem& s, double eps, const std::vector<Vec>& points,
                                       const Species* only = nullptr) {
  const int d = s.dimension;
  const double z = std::pow(kernel_normalization(eps), d);
  const double scale = 2.0 / (eps * eps);
  // Skip contributions below 1e-14 of the peak.
  const double cutoff = std::log(1e14) / scale;
  const double inv_n = 1.0 / s.size();
  DensitySample out{std::vector<double>(points.size(), 0.0), std::vector<Vec>(points.size(), Vec::Zero())};
  for (int i = 0; i < s.size(); ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    if (only && s.type[ii] != *only) continue;
    for (std::size_t k = 0; k < points.size(); ++k) {
      double e = 0.0;
      for (int l = 0; l < d; ++l) {
        const double sn = std::sin(0.5 * (points[k][l] - s.q[ii][l]));
        e += sn * sn;
      }
      if (e > cutoff) continue;
      const double w = std::exp(-scale * e) / z * inv_n;
      out.rho[k] += w;
      out.j[k] += w * s.p[ii];
    }
  }
  return out;
}

/// Wrapped Gaussian N(mu, sd^2 I) samples with zero momenta.
inline void append_gaussian(ParticleSystem& s, int count, const Vec& mu, double sd, Species type, std::uint64_t seed) {
  const int offset = s.size();
  for (int i = 0; i < count; ++i) {
    const auto z = normal_pair(seed, make_counter(0, static_cast<std::uint32_t>(type), static_cast<std::uint32_t>(offset + i),
                                                  Stream::init_positions));
    Vec x = Vec::Zero();
    for (int l = 0; l < s.dimension; ++l) x[l] = Mesh::wrap(mu[l] + sd * z[static_cast<std::size_t>(l)]);
    s.q.push_back(x);
    s.p.push_back(Vec::Zero());
    s.type.push_back(type);
  }
}

struct SpeciesInit {
  int count = 0;
  Vec mean = Vec::Zero();
  double sd = 1.0;
};

inline ParticleSystem sample_initial(int dimension, const SpeciesInit& a, const SpeciesInit& b, std::uint64_t seed) {
  require(dimension == 1 || dimension == 2, "particle dimension must be 1 or 2");
  require(a.count >= 0 && b.count >= 0 && a.count + b.count > 0, "particle counts must be non-negative");
  require(a.sd > 0.0 && b.sd > 0.0, "initial standard deviations must be positive");
  ParticleSystem s;
  s.dimension = dimension;
  append_gaussian(s, a.count, a.mean, a.sd, Species::A, seed);
  append_gaussian(s, b.count, b.mean, b.sd, Species::B, seed);
  return s;
}

/// Density of the wrapped normal N(mu, sd^2 I) on the d-torus.
inline double wrapped_gaussian_pdf(const Vec& x, const Vec& mu, double sd, int d) {
  double p = 1.0;
  for (int l = 0; l < d; ++l) {
    double s = 0.0;
    for (int k = -4; k <= 4; ++k) {
      const double u = (x[l] - mu[l] + k * kTwoPi) / sd;
      s += std::exp(-0.5 * u * u);
    }
    p *= s / (sd * std::sqrt(kTwoPi));
  }
  return p;
}

}  // namespace ridk
