#pragma once

// Refinement studies, preset experiments, the Riemann study, the
// particle-versus-RIDK comparison and the invariant suite.

#include "ridk/config.hpp"
#include "ridk/forms.hpp"
#include "ridk/multispecies.hpp"
#include "ridk/noise.hpp"
#include "ridk/particles.hpp"
#include "ridk/solver.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace ridk {

/// Least-squares slope of log e against log h.
inline double fit_slope(const std::vector<double>& h, const std::vector<double>& e) {
  require(h.size() == e.size() && h.size() >= 2, "fit_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct ConvergenceReport {
  std::string kind;
  int q = 0;
  std::vector<int> resolutions;
  std::vector<double> h;
  std::vector<double> errors;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double target = 0.0;
  bool exact = false;     // every error at round-off level
  bool monotone = true;   // errors decrease with h
};

inline ConvergenceReport finish_report(ConvergenceReport r) {
  r.exact = true;
  for (double e : r.errors) r.exact = r.exact && e <= 1e-10;
  for (std::size_t i = 1; i < r.errors.size(); ++i) r.monotone = r.monotone && r.errors[i] < r.errors[i - 1];
  if (!r.exact) r.slope = fit_slope(r.h, r.errors);
  r.target = qtilde_for(r.q);
  return r;
}

/// Smooth pair used by the Ritz study.
inline std::pair<double, Vec> ritz_target(const Vec& x) { return {std::sin(x[0]), Vec(std::cos(x[0]), 0.0)}; }

/// Ritz projection error of z against z itself at each resolution.
inline ConvergenceReport ritz_study(int q, const std::vector<int>& levels, const PointPair& z = ritz_target,
                                    double kbt = 1.0, double gamma = 1.0) {
  require(levels.size() >= 3, "convergence study needs at least three resolutions");
  ConvergenceReport r;
  r.kind = "ritz";
  r.q = q;
  for (int n : levels) {
    Discretization d(build_interval(n), q);
    const StatePair p = ritz_project(d, assemble_ah(d), z, kbt, gamma);
    const double e = std::hypot(l2_error_scalar(d, p.rho, [&](const Vec& x) { return z(x).first; }),
                                l2_error_vector(d, p.j, [&](const Vec& x) { return z(x).second; }));
    r.resolutions.push_back(n);
    r.h.push_back(d.mesh().h());
    r.errors.push_back(e);
  }
  return finish_report(r);
}

/// Damped wave with forcing: rho = 1/(2 pi) + a e^{-t} sin x, j = b e^{-t} cos x.
struct ManufacturedWave {
  double kbt = 0.125;
  double gamma = 0.25;
  double a = 0.5;
  double b = 0.3;

  std::pair<double, Vec> exact(const Vec& x, double t) const {
    const double e = std::exp(-t);
    return {1.0 / kTwoPi + a * e * std::sin(x[0]), Vec(b * e * std::cos(x[0]), 0.0)};
  }
  std::pair<double, Vec> forcing(const Vec& x, double t) const {
    const double e = std::exp(-t);
    const double fr = -(a + b) * e * std::sin(x[0]);
    const double fj = (-b + gamma * b + kbt * a) * e * std::cos(x[0]);
    return {fr, Vec(fj, 0.0)};
  }
};

inline double manufactured_error(int n, int q, double t_end, const ManufacturedWave& w = {}) {
  auto disc = make_discretization(build_interval(n), q);
  const double h = disc->mesh().h();
  const double dt_target = std::min(0.1 * h, 0.5 * std::pow(h, q + 1));
  const int steps = static_cast<int>(std::ceil(t_end / dt_target));
  const double dt = t_end / steps;
  Coefficients c;
  c.kbt = w.kbt;
  c.gamma = w.gamma;
  Stepper st(disc, c, Variant::base(), dt);
  StatePair u = l2_project(*disc, [&](const Vec& x) { return w.exact(x, 0.0); });
  for (int k = 1; k <= steps; ++k) {
    const double t = k * dt;
    StatePair f = load_vectors(*disc, [&](const Vec& x) { return w.forcing(x, t); });
    f.rho *= dt;
    f.j *= dt;
    st.step(u, nullptr, &f, static_cast<std::uint64_t>(k));
  }
  return std::hypot(l2_error_scalar(*disc, u.rho, [&](const Vec& x) { return w.exact(x, t_end).first; }),
                    l2_error_vector(*disc, u.j, [&](const Vec& x) { return w.exact(x, t_end).second; }));
}

inline ConvergenceReport manufactured_study(int q, const std::vector<int>& levels, double t_end = 0.5) {
  require(levels.size() >= 3, "convergence study needs at least three resolutions");
  ConvergenceReport r;
  r.kind = "deterministic";
  r.q = q;
  for (int n : levels) {
    r.resolutions.push_back(n);
    r.h.push_back(kTwoPi / n);
    r.errors.push_back(manufactured_error(n, q, t_end));
  }
  return finish_report(r);
}

inline ConvergenceReport convergence_study(const std::string& kind, int q, const std::vector<int>& levels) {
  if (kind == "ritz") return ritz_study(q, levels);
  if (kind == "deterministic") return manufactured_study(q, levels);
  throw ValidationError("unknown convergence kind '" + kind + "'");
}

/// Same noise modes (fixed J) injected at resolutions n and 2n; returns the
/// L2 distance of the two rho fields at t_end. For inspection only.
inline double coupled_refinement(const RunConfig& cfg, int n, std::uint64_t seed, int J) {
  require(cfg.dimension == 1, "coupled refinement is one-dimensional");
  RunConfig c = cfg;
  c.truncation = J;
  auto final_state = [&](int m) {
    auto d = make_discretization(build_interval(m), c.q);
    Stepper st(d, c.coefficients(), c.variant(), c.dt, c.epsilon);
    const Potential init(c.rho);
    StatePair u = initial_state(*d, [&](const Vec& x) { return std::make_pair(init.value(x), Vec(0.0, 0.0)); });
    for (int k = 1; k <= step_count(c.t_end, c.dt); ++k) {
      const NoiseIncrement inc = st.increment(seed, static_cast<std::uint64_t>(k));
      st.step(u, st.has_noise() ? &inc : nullptr, nullptr, static_cast<std::uint64_t>(k));
    }
    return std::make_pair(d, u);
  };
  const auto [dc, uc] = final_state(n);
  const auto [df, uf] = final_state(2 * n);
  return l2_error_scalar(*df, uf.rho, [&](const Vec& x) { return eval_scalar_at(*dc, uc.rho, x); });
}

// ---------------------------------------------------------------- Riemann

struct RiemannReport {
  int n = 0;
  double h = 0.0;
  double l1_rho = 0.0;
  double l1_j = 0.0;
  RiemannState centre_left;   // cell at x = 0, data 0 | 1
  RiemannState centre_right;  // cell at x = pi, data 1 | 0
};

/// Length of [a, b] covered by the periodic indicator of (0, pi).
inline double indicator_overlap(double a, double b) {
  double s = 0.0;
  for (int k = -2; k <= 2; ++k) {
    const double lo = std::max(a, k * kTwoPi), hi = std::min(b, k * kTwoPi + kPi);
    if (hi > lo) s += hi - lo;
  }
  return s;
}

/// q = 0, c = 1, gamma = 0, no noise; rho = 1 on (0, pi) and 0 elsewhere, j = 0.
/// The exact solution is rho = (r0(x - t) + r0(x + t))/2, j = (r0(x - t) - r0(x + t))/2.
inline RiemannReport riemann_study(int n, double t_end, double dt_over_h = 0.1) {
  require(n % 2 == 0, "riemann_study: n must be even");
  auto disc = make_discretization(build_interval(n), 0);
  const double h = disc->mesh().h();
  const int steps = static_cast<int>(std::ceil(t_end / (dt_over_h * h)));
  Coefficients c;
  c.kbt = 1.0;
  c.gamma = 0.0;
  Stepper st(disc, c, Variant::base(), t_end / steps);
  StatePair u = interpolate(*disc, [](const Vec& x) {
    return std::make_pair(x[0] > 0.0 && x[0] < kPi ? 1.0 : 0.0, Vec(0.0, 0.0));
  });
  for (int k = 1; k <= steps; ++k) st.step(u, nullptr, nullptr, static_cast<std::uint64_t>(k));

  RiemannReport r;
  r.n = n;
  r.h = h;
  // Cell averages of the DG0 density; j is averaged over the cell by quadrature.
  for (int k = 0; k < n; ++k) {
    const double a = k * h, b = (k + 1) * h;
    const double fwd = indicator_overlap(a - t_end, b - t_end) / h;
    const double bwd = indicator_overlap(a + t_end, b + t_end) / h;
    const double rho_ex = 0.5 * (fwd + bwd), j_ex = 0.5 * (fwd - bwd);
    double j_avg = 0.0;
    for (const auto& qp : disc->mesh().element_rule(k, 4)) j_avg += qp.weight * eval_vector(*disc, u.j, k, qp.point)[0];
    j_avg /= h;
    r.l1_rho += h * std::abs(u.rho[k] - rho_ex);
    r.l1_j += h * std::abs(j_avg - j_ex);
    if (k == 0 || k == n / 2) {
      // The vertex x_k is the discontinuity; average the two cells that touch it.
      const int km = (k + n - 1) % n;
      double jm = 0.0;
      for (const auto& qp : disc->mesh().element_rule(km, 4)) jm += qp.weight * eval_vector(*disc, u.j, km, qp.point)[0];
      const RiemannState s{0.5 * (u.rho[k] + u.rho[km]), 0.5 * (j_avg + jm / h)};
      (k == 0 ? r.centre_left : r.centre_right) = s;
    }
  }
  return r;
}

// ---------------------------------------------------------------- experiments

struct SeedSummary {
  std::uint64_t seed = 0;
  double min_rho = 0.0;
  double first_negative_t = -1.0;
  double max_mass_drift = 0.0;
  double max_b_mass = std::numeric_limits<double>::quiet_NaN();
  bool energy_checked = false;
  bool energy_non_increasing = true;
};

struct ExperimentResult {
  std::vector<RunOutput> runs;               // single species
  std::vector<TwoSpeciesOutput> two_species;  // with [reaction]
  std::vector<SeedSummary> summary;
  std::shared_ptr<const Discretization> disc;
};

inline bool energy_non_increasing(const std::vector<Diagnostics>& d) {
  for (std::size_t i = 1; i < d.size(); ++i)
    if (d[i].energy > d[i - 1].energy) return false;
  return true;
}

/// `deterministic` runs (no noise, no potential) are also checked for energy decay.
inline SeedSummary summarize(std::uint64_t seed, const std::vector<Diagnostics>& diag, bool deterministic) {
  SeedSummary s;
  s.seed = seed;
  s.min_rho = std::numeric_limits<double>::infinity();
  const double m0 = diag.front().mass;
  for (const auto& d : diag) {
    s.min_rho = std::min(s.min_rho, d.min_rho);
    if (d.min_rho < 0.0 && s.first_negative_t < 0.0) s.first_negative_t = d.t;
    s.max_mass_drift = std::max(s.max_mass_drift, std::abs(d.mass - m0) / std::abs(m0));
  }
  if (deterministic) {
    s.energy_checked = true;
    s.energy_non_increasing = energy_non_increasing(diag);
  }
  return s;
}

inline StatePair single_species_initial(const Discretization& d, const RunConfig& c) {
  const Potential init(c.rho);
  return initial_state(d, [&](const Vec& x) {
    return std::make_pair(init.value(x), Vec(0.0, 0.0));
  });
}

inline TwoSpeciesState two_species_initial(const Discretization& d, const RunConfig& c) {
  const double total = c.n_a + c.n_b;
  const int dim = c.dimension;
  TwoSpeciesState s;
  s.a = initial_state(d, [&](const Vec& x) {
    return std::make_pair(c.n_a / total * wrapped_gaussian_pdf(x, c.mean_a, c.sd_a, dim), Vec(0.0, 0.0));
  });
  s.b = initial_state(d, [&](const Vec& x) {
    return std::make_pair(c.n_b / total * wrapped_gaussian_pdf(x, c.mean_b, c.sd_b, dim), Vec(0.0, 0.0));
  });
  // Quadrature of a narrow Gaussian on a coarse mesh misses the exact type mass.
  s.a.rho = mass_correct(d, s.a.rho, c.n_a / total);
  s.b.rho = mass_correct(d, s.b.rho, c.n_b / total);
  return s;
}

inline ExperimentResult run_experiment(const RunConfig& c, const std::vector<std::uint64_t>& seeds) {
  ExperimentResult out;
  out.disc = make_discretization(c.mesh(), c.q);
  const bool deterministic = c.sigma == 0.0 && Potential(c.potential).is_zero_gradient();
  const Coefficients coef = c.coefficients();
  if (!c.reaction) {
    Stepper st(out.disc, coef, c.variant(), c.dt, c.epsilon);
    const StatePair u0 = single_species_initial(*out.disc, c);
    RunGrid g = c.grid();
    g.log_switch_premise = c.kind == "tau";
    for (auto seed : seeds) {
      out.runs.push_back(run_from(st, u0, g, seed));
      out.summary.push_back(summarize(seed, out.runs.back().diagnostics, deterministic));
    }
    return out;
  }
  TwoSpeciesStepper st(out.disc, coef, c.variant(), c.coupling(), c.dt, c.epsilon);
  const TwoSpeciesState s0 = two_species_initial(*out.disc, c);
  for (auto seed : seeds) {
    out.two_species.push_back(run_two_species(st, s0, c.grid(), seed));
    const TwoSpeciesOutput& o = out.two_species.back();
    std::vector<Diagnostics> total = o.a;
    for (std::size_t i = 0; i < total.size(); ++i) {
      total[i].mass += o.b[i].mass;
      total[i].min_rho = std::min(o.a[i].min_rho, o.b[i].min_rho);
      total[i].energy += o.b[i].energy;
    }
    SeedSummary s = summarize(seed, total, false);
    s.max_b_mass = o.max_b_mass();
    out.summary.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------- particles vs RIDK

struct ComparisonReport {
  std::vector<double> t;
  std::vector<double> particle_a, particle_b;
  std::vector<double> ridk_a, ridk_b;
  double sup_distance_b = 0.0;
  bool particle_b_monotone = true;
  double ridk_max_b = 0.0;
};

/// Runs the particle system and the two-species RIDK system from matched
/// initial data and samples both mass profiles every `every` steps.
inline ComparisonReport compare_particle_vs_ridk(const RunConfig& c, std::uint64_t seed, int every = 10) {
  require(c.reaction, "compare needs a [reaction] section");
  ComparisonReport r;
  const int steps = step_count(c.t_end, c.dt);
  const double total = c.n_a + c.n_b;

  ParticleSystem ps = sample_initial(c.dimension, c.species_a(), c.species_b(), seed);
  const Potential v(c.potential);
  const ReactionParams rp{c.kappa, c.radius};
  std::vector<double> pb{ps.count(Species::B) / total};
  for (int k = 1; k <= steps; ++k) {
    langevin_step(ps, c.gamma, c.sigma, v, c.dt, seed, static_cast<std::uint64_t>(k));
    react(ps, rp, c.dt, seed, static_cast<std::uint64_t>(k));
    pb.push_back(ps.count(Species::B) / total);
  }

  auto disc = make_discretization(c.mesh(), c.q);
  TwoSpeciesStepper st(disc, c.coefficients(), c.variant(), c.coupling(), c.dt, c.epsilon);
  const TwoSpeciesOutput o = run_two_species(st, two_species_initial(*disc, c), c.grid(), seed);

  for (int k = 0; k <= steps; k += every) {
    const std::size_t kk = static_cast<std::size_t>(k);
    r.t.push_back(k * c.dt);
    r.particle_b.push_back(pb[kk]);
    r.particle_a.push_back(1.0 - pb[kk]);
    r.ridk_a.push_back(o.a[kk].mass);
    r.ridk_b.push_back(o.b[kk].mass);
    r.sup_distance_b = std::max(r.sup_distance_b, std::abs(pb[kk] - o.b[kk].mass));
  }
  for (std::size_t i = 1; i < pb.size(); ++i) r.particle_b_monotone = r.particle_b_monotone && pb[i] >= pb[i - 1];
  r.ridk_max_b = o.max_b_mass();
  return r;
}

// ---------------------------------------------------------------- noise check

/// lambda_j by adaptive quadrature of the defining integral.
inline double lambda_quadrature(int j, double eps) {
  using boost::math::quadrature::gauss_kronrod;
  auto g = [eps](double x) {
    const double s = std::sin(0.5 * x);
    return std::exp(-s * s / (eps * eps));
  };
  const double z = gauss_kronrod<double, 61>::integrate(g, -kPi, kPi, 15, 1e-15);
  const double num = gauss_kronrod<double, 61>::integrate([&](double x) { return g(x) * std::cos(j * x); }, -kPi, kPi,
                                                          15, 1e-15);
  return num / z;
}

struct CovarianceCheck {
  Vec x, y;
  double expected = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo covariance of the sampled field at point pairs.
inline std::vector<CovarianceCheck> covariance_check(double eps, double h, int d, const std::vector<std::pair<Vec, Vec>>& pairs,
                                                     int samples, std::uint64_t seed) {
  const TruncationSet set = truncation_set(eps, h, 0.5, d);
  const VonMisesSpectrum spec(eps, set.J);
  std::vector<Vec> pts;
  for (const auto& p : pairs) {
    pts.push_back(p.first);
    pts.push_back(p.second);
  }
  const NoiseEvaluator ev(spec, set, pts);
  std::vector<double> sxy(pairs.size(), 0.0), sx(pairs.size(), 0.0), sy(pairs.size(), 0.0), sq(pairs.size(), 0.0);
  Eigen::VectorXd out;
  for (int s = 0; s < samples; ++s) {
    ev.evaluate(sample_increment(spec, set, 1.0, seed, static_cast<std::uint64_t>(s)), 0, out);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double a = out[static_cast<Eigen::Index>(2 * i)], b = out[static_cast<Eigen::Index>(2 * i + 1)];
      sxy[i] += a * b;
      sx[i] += a;
      sy[i] += b;
      sq[i] += a * a * b * b;
    }
  }
  std::vector<CovarianceCheck> res;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CovarianceCheck c;
    c.x = pairs[i].first;
    c.y = pairs[i].second;
    c.expected = truncated_covariance(spec, set, c.x, c.y);
    // Zero mean is known exactly, so E[ab] estimates the covariance.
    c.empirical = sxy[i] / samples;
    const double var = sq[i] / samples - c.empirical * c.empirical;
    c.standard_error = std::sqrt(std::max(var, 0.0) / samples);
    res.push_back(c);
  }
  return res;
}

// ---------------------------------------------------------------- invariants

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline std::string fmt_g(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

inline std::vector<CheckResult> invariant_suite() {
  std::vector<CheckResult> out;
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double r = u(gen);
      const Vec j(u(gen), u(gen));
      Vec n(u(gen), u(gen));
      n.normalize();
      const FluxValues f = numerical_flux(r, r, j, j, n, 0.2 + std::abs(u(gen)));
      worst = std::max({worst, std::abs(f.h_rho - r), (f.h_j - j).norm()});
    }
    out.push_back({"flux consistency", worst <= 1e-12, "max deviation " + fmt_g(worst)});
  }
  {
    double worst = 0.0;
    bool dissipative = true;
    for (int q = 0; q <= 1; ++q) {
      Discretization d(build_interval(12), q);
      const DiscreteOperator op = assemble_ah(d);
      for (int i = 0; i < 100; ++i) {
        StatePair p{Eigen::VectorXd(op.nr()), Eigen::VectorXd(op.nj())};
        for (Eigen::Index k = 0; k < p.rho.size(); ++k) p.rho[k] = u(gen);
        for (Eigen::Index k = 0; k < p.j.size(); ++k) p.j[k] = u(gen);
        const double kbt = 0.125, gamma = 0.25;
        const double lhs = op.apply(p, p, kbt, gamma);
        double jumps = 0.0;
        for (int f = 0; f < d.mesh().num_facets(); ++f) {
          const auto [a, b] = scalar_traces(d, p.rho, f, d.mesh().facet(f).a);
          jumps += (a - b) * (a - b);
        }
        const MassMatrices m = assemble_mass(d);
        const double rhs = -gamma * p.j.dot(m.j * p.j) - 0.5 * std::pow(kbt, 1.5) * jumps;
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
        dissipative = dissipative && lhs <= 0.0;
      }
    }
    out.push_back({"quadratic identity (q = 0, 1)", worst <= 1e-10 && dissipative, "max relative gap " + fmt_g(worst)});
  }
  {
    bool ok = true;
    double worst = 0.0;
    for (double eps : {0.05, 0.1}) {
      const double x = 1.0 / (2 * eps * eps);
      const auto r = bessel_ratios(400, x);
      for (double h : {0.2, 0.1, 0.05}) {
        for (double qt : {0.5, 1.0}) {
          const int J = truncation_index(eps, h, qt);
          double tail = 0.0;
          for (int j = J + 1; j <= 400; ++j) tail += 2.0 * r[static_cast<std::size_t>(j)];
          const double bound = 2.0 / eps * std::pow(h, 2 * qt);
          worst = std::max(worst, tail / bound);
          ok = ok && tail <= bound;
        }
      }
    }
    out.push_back({"noise tail bound", ok, "max tail/bound " + fmt_g(worst)});
  }
  {
    RunConfig c = preset_config("fig_intro");
    c.t_end = 0.5;
    c.snapshot_times.clear();
    const ExperimentResult r = run_experiment(c, {1, 2});
    double drift = 0.0;
    for (const auto& s : r.summary) drift = std::max(drift, s.max_mass_drift);
    out.push_back({"mass conservation with noise", drift <= 1e-10, "max relative drift " + fmt_g(drift)});
  }
  {
    bool ok = true;
    for (int q = 0; q <= 1; ++q) {
      auto d = make_discretization(build_interval(32), q);
      Coefficients c;
      c.kbt = 0.125;
      c.gamma = 0.25;
      Stepper st(d, c, Variant::base(), 1e-2);
      StatePair s = interpolate(*d, [](const Vec& x) {
        return std::make_pair(1.0 + (x[0] < kPi ? 0.5 : -0.5), Vec(std::sin(3 * x[0]), 0.0));
      });
      const RunOutput o = run_from(st, s, RunGrid{1e-2, 2.0, {}, false}, 1);
      ok = ok && energy_non_increasing(o.diagnostics);
    }
    out.push_back({"energy decay without noise (q = 0, 1)", ok, ok ? "non-increasing" : "increase detected"});
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double rm = u(gen), rp = u(gen), jm = u(gen), jp = u(gen), kbt = 0.05 + std::abs(u(gen));
      const RiemannState mid = riemann_solution(rm, rp, jm, jp, std::sqrt(kbt), 0.0, 1.0);
      const FluxValues f = numerical_flux(rm, rp, Vec(jm, 0.0), Vec(jp, 0.0), Vec(1.0, 0.0), kbt);
      worst = std::max({worst, std::abs(f.h_rho - mid.rho), std::abs(f.h_j[0] - mid.j)});
    }
    out.push_back({"Godunov state equals flux", worst <= 1e-13, "max deviation " + fmt_g(worst)});
  }
  {
    double worst = 0.0;
    for (int q = 0; q <= 1; ++q) {
      Discretization d(build_interval(9), q);
      Discretization f(d.mesh().flipped(), q);
      const Eigen::MatrixXd a = Eigen::MatrixXd(assemble_ah(d).matrix(0.7, 0.3));
      const Eigen::MatrixXd b = Eigen::MatrixXd(assemble_ah(f).matrix(0.7, 0.3));
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    Discretization d2(build_torus2d(4, 4), 0);
    Discretization f2(d2.mesh().flipped(), 0);
    worst = std::max(worst, (Eigen::MatrixXd(assemble_ah(d2).matrix(0.7, 0.3)) -
                             Eigen::MatrixXd(assemble_ah(f2).matrix(0.7, 0.3)))
                                .cwiseAbs()
                                .maxCoeff());
    out.push_back({"orientation independence", worst <= 1e-12, "max entry change " + fmt_g(worst)});
  }
  return out;
}

}  // namespace ridk
