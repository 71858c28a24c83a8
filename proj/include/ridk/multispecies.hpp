#pragma once

// Two RIDK species coupled by the reaction A + B -> 2B. The transfer is
// explicit in time and enters both mass balances with opposite signs.

#include "ridk/solver.hpp"

#include <cmath>
#include <memory>
#include <vector>

namespace ridk {

struct CouplingParams {
  double kappa = 0.2;
  double radius = 0.15;
  double n_particles = 5000.0;
  double rho_th = 0.012;

  void validate() const {
    require(kappa >= 0.0, "kappa must be non-negative");
    require(radius >= 0.0, "radius must be non-negative");
    require(n_particles >= 0.0, "n_particles must be non-negative");
    require(rho_th >= 0.0, "rho_th must be non-negative");
  }
  double prefactor() const { return kappa * kPi * radius * radius * n_particles; }
};

/// kappa pi r^2 N rhoA^+ rhoB^+ 1{rhoB > rho_th}, pointwise.
inline double reaction_rate(double rho_a, double rho_b, const CouplingParams& c) {
  if (!(rho_b > c.rho_th) || rho_a <= 0.0 || rho_b <= 0.0) return 0.0;
  return c.prefactor() * rho_a * rho_b;
}

inline Eigen::VectorXd reaction_rate_field(const Eigen::VectorXd& rho_a, const Eigen::VectorXd& rho_b,
                                           const CouplingParams& c) {
  require(rho_a.size() == rho_b.size(), "reaction_rate_field: sample counts differ");
  Eigen::VectorXd r(rho_a.size());
  for (Eigen::Index p = 0; p < r.size(); ++p) r[p] = reaction_rate(rho_a[p], rho_b[p], c);
  return r;
}

struct TwoSpeciesState {
  StatePair a;
  StatePair b;
  double t = 0.0;
};

class TwoSpeciesStepper {
 public:
  TwoSpeciesStepper(std::shared_ptr<const Discretization> disc, const Coefficients& coef, const Variant& variant,
                    const CouplingParams& coupling, double dt, std::optional<double> noise_epsilon)
      : a_(disc, coef, variant, dt, noise_epsilon), b_(std::move(disc), coef, variant, dt, noise_epsilon),
        coupling_(coupling) {
    coupling_.validate();
  }

  Stepper& species_a() { return a_; }
  Stepper& species_b() { return b_; }
  const CouplingParams& coupling() const { return coupling_; }

  /// Load of dt * rate against the scalar basis; its total is the mass moved from A to B.
  Eigen::VectorXd transfer(const TwoSpeciesState& s) const {
    const Eigen::VectorXd rate = reaction_rate_field(a_.rho_at_points(s.a.rho), a_.rho_at_points(s.b.rho), coupling_);
    return a_.dt() * a_.scalar_load(rate);
  }

  /// Advances both species; returns the mass moved from A to B.
  double step(TwoSpeciesState& s, const NoiseIncrement* inc_a, const NoiseIncrement* inc_b, std::uint64_t index) {
    StatePair ea{Eigen::VectorXd(), Eigen::VectorXd::Zero(s.a.j.size())};
    ea.rho = transfer(s);
    StatePair eb{ea.rho, ea.j};
    ea.rho = -ea.rho;
    a_.step(s.a, inc_a, &ea, index);
    b_.step(s.b, inc_b, &eb, index);
    s.t += a_.dt();
    return eb.rho.sum();
  }

 private:
  Stepper a_;
  Stepper b_;
  CouplingParams coupling_;
};

struct TwoSpeciesOutput {
  std::vector<Diagnostics> a;
  std::vector<Diagnostics> b;
  std::vector<double> transferred;  // per step
  std::vector<Snapshot> snapshots_a;
  std::vector<Snapshot> snapshots_b;

  double max_total_mass_drift() const {
    const double m0 = a.front().mass + b.front().mass;
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i].mass + b[i].mass - m0) / std::abs(m0));
    return m;
  }
  double max_b_mass() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& d : b) m = std::max(m, d.mass);
    return m;
  }
};

inline TwoSpeciesOutput run_two_species(TwoSpeciesStepper& stepper, TwoSpeciesState s, const RunGrid& grid,
                                        std::uint64_t seed) {
  TwoSpeciesOutput out;
  const int steps = step_count(grid.t_end, grid.dt);
  auto snap = [&](int n) {
    const double t = n * grid.dt;
    for (double ts : grid.snapshot_times) {
      if (std::abs(ts - t) < 0.5 * grid.dt) {
        out.snapshots_a.push_back({t, s.a});
        out.snapshots_b.push_back({t, s.b});
      }
    }
  };
  Stepper& sa = stepper.species_a();
  Stepper& sb = stepper.species_b();
  out.a.push_back(sa.diagnostics(s.a, 0.0));
  out.b.push_back(sb.diagnostics(s.b, 0.0));
  snap(0);
  for (int n = 1; n <= steps; ++n) {
    const auto idx = static_cast<std::uint64_t>(n);
    if (sa.has_noise()) {
      const NoiseIncrement ia = sa.increment(seed, idx, Stream::noise_a);
      const NoiseIncrement ib = sb.increment(seed, idx, Stream::noise_b);
      out.transferred.push_back(stepper.step(s, &ia, &ib, idx));
    } else {
      out.transferred.push_back(stepper.step(s, nullptr, nullptr, idx));
    }
    s.t = n * grid.dt;
    out.a.push_back(sa.diagnostics(s.a, s.t));
    out.b.push_back(sb.diagnostics(s.b, s.t));
    snap(n);
  }
  return out;
}

}  // namespace ridk
