#pragma once

// Von Mises correlated noise: Bessel-ratio spectrum, truncation, sampling and
// fast evaluation of increments at fixed point sets.

#include "ridk/common.hpp"
#include "ridk/random.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

namespace ridk {

/// I_j(x)/I_0(x) for j = 0..jmax by the downward ratio recurrence
/// r_k = I_k/I_{k-1} = 1/(2k/x + r_{k+1}), started well above max(jmax, x).
inline std::vector<double> bessel_ratios(int jmax, double x) {
  require(jmax >= 0, "bessel_ratio: j must be non-negative");
  require(x > 0.0, "bessel_ratio: x must be positive");
  require(x <= 1e6, "bessel_ratio: x beyond supported range (x > 1e6)");
  const int top = std::max(jmax, static_cast<int>(std::ceil(x))) + 64;
  std::vector<double> r(static_cast<std::size_t>(top) + 2, 0.0);
  const double kt = top + 1.0;
  r[static_cast<std::size_t>(top) + 1] = x / (kt + std::sqrt(kt * kt + x * x));
  for (int k = top; k >= 1; --k) r[static_cast<std::size_t>(k)] = 1.0 / (2.0 * k / x + r[static_cast<std::size_t>(k) + 1]);
  std::vector<double> out(static_cast<std::size_t>(jmax) + 1);
  out[0] = 1.0;
  for (int j = 1; j <= jmax; ++j) out[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(j) - 1] * r[static_cast<std::size_t>(j)];
  return out;
}

inline double bessel_ratio(int j, double x) { return bessel_ratios(j, x).back(); }

/// Trigonometric system: pi^{-1/2} cos(jx) for j > 0, pi^{-1/2} sin(jx) for
/// j < 0 and (2 pi)^{-1/2} for j = 0.
inline double trig_basis(int j, double x) {
  if (j > 0) return std::cos(j * x) / std::sqrt(kPi);
  if (j < 0) return std::sin(j * x) / std::sqrt(kPi);
  return 1.0 / std::sqrt(kTwoPi);
}

using MultiIndex = std::array<int, 2>;

class VonMisesSpectrum {
 public:
  VonMisesSpectrum(double eps, int jmax) : eps_(eps) {
    require(eps > 0.0, "VonMisesSpectrum: epsilon must be positive");
    lambda_ = bessel_ratios(jmax, 1.0 / (2.0 * eps * eps));
  }
  double epsilon() const { return eps_; }
  int jmax() const { return static_cast<int>(lambda_.size()) - 1; }
  double lambda(int j) const {
    const int a = std::abs(j);
    require(a <= jmax(), "VonMisesSpectrum: index beyond table");
    return lambda_[static_cast<std::size_t>(a)];
  }
  double eigenvalue(const MultiIndex& j, int d) const {
    double v = lambda(j[0]);
    if (d == 2) v *= lambda(j[1]);
    return v;
  }

 private:
  double eps_;
  std::vector<double> lambda_;
};

/// Product of one-dimensional Bessel ratios.
inline double eigenvalue(const MultiIndex& j, int d, double eps) {
  const int top = std::max(std::abs(j[0]), d == 2 ? std::abs(j[1]) : 0);
  return VonMisesSpectrum(eps, top).eigenvalue(j, d);
}

struct TruncationSet {
  int dimension = 1;
  int J = 0;
  std::vector<MultiIndex> modes;
  bool contains(const MultiIndex& j) const {
    return std::abs(j[0]) + (dimension == 2 ? std::abs(j[1]) : 0) <= J && (dimension == 2 || j[1] == 0);
  }
};

inline int truncation_index(double eps, double h, double qtilde) {
  require(eps > 0.0 && h > 0.0 && qtilde > 0.0, "truncation_set: eps, h and qtilde must be positive");
  if (h >= 1.0) return 0;
  return static_cast<int>(std::ceil(std::abs(2.0 * qtilde * std::log(h)) / eps - 1e-12));
}

/// All j in Z^d with |j|_1 <= J.
inline TruncationSet truncation_set_fixed(int J, int d) {
  require(d == 1 || d == 2, "truncation_set: dimension must be 1 or 2");
  require(J >= 0, "truncation_set: J must be non-negative");
  TruncationSet s;
  s.dimension = d;
  s.J = J;
  for (int a = -s.J; a <= s.J; ++a) {
    if (d == 1) {
      s.modes.push_back({a, 0});
      continue;
    }
    const int rest = s.J - std::abs(a);
    for (int b = -rest; b <= rest; ++b) s.modes.push_back({a, b});
  }
  return s;
}

/// J = ceil(|ln h^{2 qtilde}| / eps).
inline TruncationSet truncation_set(double eps, double h, double qtilde, int d) {
  return truncation_set_fixed(truncation_index(eps, h, qtilde), d);
}

/// Order of the truncation: 1/2 for q = 0, q otherwise.
inline double qtilde_for(int q) { return q == 0 ? 0.5 : static_cast<double>(q); }

/// Per-mode Gaussian coefficients of one time increment for each component.
struct NoiseIncrement {
  int dimension = 1;
  const TruncationSet* set = nullptr;
  std::vector<double> sqrt_lambda;                // per mode
  std::array<std::vector<double>, 2> coeffs;      // per component, per mode; N(0, dt)

  double evaluate(int component, const Vec& x) const {
    double v = 0.0;
    for (std::size_t m = 0; m < set->modes.size(); ++m) {
      const MultiIndex& j = set->modes[m];
      double e = trig_basis(j[0], x[0]);
      if (dimension == 2) e *= trig_basis(j[1], x[1]);
      v += sqrt_lambda[m] * e * coeffs[static_cast<std::size_t>(component)][m];
    }
    return v;
  }
};

inline std::vector<double> sqrt_eigenvalues(const VonMisesSpectrum& spec, const TruncationSet& set) {
  std::vector<double> out;
  out.reserve(set.modes.size());
  for (const auto& j : set.modes) out.push_back(std::sqrt(spec.eigenvalue(j, set.dimension)));
  return out;
}

/// Draws the coefficients of step `step`; each (component, mode) has its own
/// counter so the result is independent of evaluation order.
inline NoiseIncrement sample_increment(const VonMisesSpectrum& spec, const TruncationSet& set, double dt,
                                       std::uint64_t seed, std::uint64_t step, Stream stream = Stream::noise_a) {
  require(dt > 0.0, "sample_increment: dt must be positive");
  NoiseIncrement inc;
  inc.dimension = set.dimension;
  inc.set = &set;
  inc.sqrt_lambda = sqrt_eigenvalues(spec, set);
  const double sdt = std::sqrt(dt);
  for (int c = 0; c < set.dimension; ++c) {
    auto& out = inc.coeffs[static_cast<std::size_t>(c)];
    out.resize(set.modes.size());
    for (std::size_t m = 0; m < set.modes.size(); ++m) {
      out[m] = sdt * standard_normal(seed, make_counter(step, static_cast<std::uint32_t>(c),
                                                         static_cast<std::uint32_t>(m), stream));
    }
  }
  return inc;
}

/// Evaluates increments at a fixed list of points. One dimension uses a dense
/// point-by-mode table; two dimensions exploit the tensor structure of the
/// modes over the distinct x and y coordinates of the points.
class NoiseEvaluator {
 public:
  NoiseEvaluator(const VonMisesSpectrum& spec, const TruncationSet& set, const std::vector<Vec>& points)
      : dim_(set.dimension), J_(set.J), npts_(static_cast<int>(points.size())) {
    const int w = 2 * J_ + 1;
    if (dim_ == 1) {
      table_.resize(npts_, w);
      for (int p = 0; p < npts_; ++p)
        for (int a = -J_; a <= J_; ++a)
          table_(p, a + J_) = std::sqrt(spec.lambda(a)) * trig_basis(a, points[static_cast<std::size_t>(p)][0]);
    } else {
      std::vector<double> xs, ys;
      ix_.resize(static_cast<std::size_t>(npts_));
      iy_.resize(static_cast<std::size_t>(npts_));
      for (int p = 0; p < npts_; ++p) {
        ix_[static_cast<std::size_t>(p)] = intern(xs, points[static_cast<std::size_t>(p)][0]);
        iy_[static_cast<std::size_t>(p)] = intern(ys, points[static_cast<std::size_t>(p)][1]);
      }
      ax_.resize(static_cast<int>(xs.size()), w);
      ay_.resize(static_cast<int>(ys.size()), w);
      for (int a = -J_; a <= J_; ++a) {
        const double s = std::sqrt(spec.lambda(a));
        for (std::size_t i = 0; i < xs.size(); ++i) ax_(static_cast<int>(i), a + J_) = s * trig_basis(a, xs[i]);
        for (std::size_t i = 0; i < ys.size(); ++i) ay_(static_cast<int>(i), a + J_) = s * trig_basis(a, ys[i]);
      }
    }
    for (std::size_t m = 0; m < set.modes.size(); ++m) slot_.push_back(set.modes[m]);
  }

  int size() const { return npts_; }

  /// Values of component `c` of the increment at every stored point.
  void evaluate(const NoiseIncrement& inc, int c, Eigen::VectorXd& out) const {
    const auto& g = inc.coeffs[static_cast<std::size_t>(c)];
    const int w = 2 * J_ + 1;
    if (dim_ == 1) {
      Eigen::VectorXd coef = Eigen::VectorXd::Zero(w);
      for (std::size_t m = 0; m < slot_.size(); ++m) coef[slot_[m][0] + J_] = g[m];
      out.noalias() = table_ * coef;
      return;
    }
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(w, w);
    for (std::size_t m = 0; m < slot_.size(); ++m) coef(slot_[m][0] + J_, slot_[m][1] + J_) = g[m];
    const Eigen::MatrixXd partial = ax_ * coef;  // distinct x by j2
    out.resize(npts_);
    for (int p = 0; p < npts_; ++p)
      out[p] = partial.row(ix_[static_cast<std::size_t>(p)]).dot(ay_.row(iy_[static_cast<std::size_t>(p)]));
  }

 private:
  static int intern(std::vector<double>& vals, double v) {
    for (std::size_t i = vals.size(); i-- > 0;)
      if (std::abs(vals[i] - v) <= 1e-13) return static_cast<int>(i);
    vals.push_back(v);
    return static_cast<int>(vals.size()) - 1;
  }

  int dim_;
  int J_;
  int npts_;
  Eigen::MatrixXd table_;
  Eigen::MatrixXd ax_, ay_;
  std::vector<int> ix_, iy_;
  std::vector<MultiIndex> slot_;
};

/// Z_eps = int_T exp(-2 sin^2(x/2)/eps^2) dx, so that the kernel has unit mass.
inline double kernel_normalization(double eps) {
  require(eps > 0.0, "kernel_normalization: epsilon must be positive");
  static thread_local std::map<double, double> cache;
  if (auto it = cache.find(eps); it != cache.end()) return it->second;
  auto f = [eps](double x) {
    const double s = std::sin(0.5 * x);
    return std::exp(-2.0 * s * s / (eps * eps));
  };
  const double z = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -kPi, kPi, 20, 1e-15);
  cache[eps] = z;
  return z;
}

/// Periodic von Mises kernel of unit mass on the d-torus.
inline double kernel_eval(double eps, const Vec& x, int d) {
  const double z = kernel_normalization(eps);
  double e = 0.0;
  for (int l = 0; l < d; ++l) {
    const double s = std::sin(0.5 * x[l]);
    e += s * s;
  }
  return std::exp(-2.0 * e / (eps * eps)) / std::pow(z, d);
}

/// Pointwise variance rate sum_j lambda_j e_j(x)^2 over a truncation set.
inline double truncated_covariance(const VonMisesSpectrum& spec, const TruncationSet& set, const Vec& x, const Vec& y) {
  double v = 0.0;
  for (const auto& j : set.modes) {
    double ex = trig_basis(j[0], x[0]);
    double ey = trig_basis(j[0], y[0]);
    if (set.dimension == 2) {
      ex *= trig_basis(j[1], x[1]);
      ey *= trig_basis(j[1], y[1]);
    }
    v += spec.eigenvalue(j, set.dimension) * ex * ey;
  }
  return v;
}

}  // namespace ridk
