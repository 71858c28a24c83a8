#include "ridk/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ridk;

TEST(Fit, SlopeOfPowerLaw) {
  EXPECT_NEAR(fit_slope({0.1, 0.05, 0.025}, {3e-2, 7.5e-3, 1.875e-3}), 2.0, 1e-12);
  EXPECT_THROW(fit_slope({1.0}, {1.0}), ValidationError);
}

TEST(Convergence, RitzRates) {
  const ConvergenceReport r0 = ritz_study(0, {16, 32, 64, 128});
  const ConvergenceReport r1 = ritz_study(1, {16, 32, 64, 128});
  EXPECT_GE(r0.slope, 0.45);
  EXPECT_GE(r1.slope, 0.9);
  EXPECT_TRUE(r0.monotone);
  EXPECT_FALSE(r1.exact);
}

TEST(Convergence, DiscreteTargetIsExact) {
  const ConvergenceReport r =
      ritz_study(1, {4, 8, 16}, [](const Vec&) { return std::make_pair(0.3, Vec(-0.7, 0.0)); });
  EXPECT_TRUE(r.exact);
  EXPECT_TRUE(std::isnan(r.slope));
}

TEST(Convergence, ManufacturedWaveRates) {
  EXPECT_GE(manufactured_study(0, {16, 32, 64}).slope, 0.45);
  EXPECT_GE(manufactured_study(1, {8, 16, 32}).slope, 0.95);
}

TEST(Convergence, UnknownKindRejected) { EXPECT_THROW(convergence_study("spectral", 0, {4, 8, 16}), ValidationError); }

TEST(Riemann, MiddleStatesAndRefinement) {
  const RiemannReport a = riemann_study(128, 0.5), b = riemann_study(256, 0.5);
  // Data 0 | 1 at x = 0 and 1 | 0 at x = pi, unit sound speed.
  EXPECT_NEAR(b.centre_left.rho, 0.5, 2 * b.h);
  EXPECT_NEAR(b.centre_left.j, -0.5, 2 * b.h);
  EXPECT_NEAR(b.centre_right.rho, 0.5, 2 * b.h);
  EXPECT_NEAR(b.centre_right.j, 0.5, 2 * b.h);
  EXPECT_LT(b.l1_rho, a.l1_rho);
  EXPECT_LT(b.l1_j, a.l1_j);
}

TEST(Riemann, OverlapHelper) {
  EXPECT_DOUBLE_EQ(indicator_overlap(0.0, kPi), kPi);
  EXPECT_DOUBLE_EQ(indicator_overlap(-1.0, 1.0), 1.0);
  EXPECT_NEAR(indicator_overlap(kTwoPi - 0.5, kTwoPi + 0.5), 0.5, 1e-15);
}

TEST(Experiment, NoiseOffIdenticalAcrossSeeds) {
  const RunConfig c = preset_config("fig_intro", {"model.sigma=0", "discretization.t_end=0.2",
                                                  "output.snapshot_times=0.2", "discretization.n=64"});
  const ExperimentResult r = run_experiment(c, {1, 2});
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_EQ(r.runs[0].snapshots[0].u.rho, r.runs[1].snapshots[0].u.rho);
  EXPECT_FALSE(r.summary[0].energy_checked);
  EXPECT_LE(r.summary[0].max_mass_drift, 1e-10);
}

TEST(Experiment, FreeDeterministicRunsCheckEnergy) {
  const RunConfig c = preset_config("fig_intro", {"model.sigma=0", "model.potential=0", "discretization.t_end=0.2",
                                                  "output.snapshot_times=", "discretization.n=64"});
  const ExperimentResult r = run_experiment(c, {1});
  EXPECT_TRUE(r.summary[0].energy_checked);
  EXPECT_TRUE(r.summary[0].energy_non_increasing);
}

TEST(Compare, NoReactionNoDrift) {
  const RunConfig c = preset_config("twod_react", {"reaction.kappa=0", "model.potential=0", "reaction.n_a=180",
                                                   "reaction.n_b=20", "discretization.nx=8", "discretization.ny=8",
                                                   "discretization.t_end=0.5", "output.snapshot_times="});
  const ComparisonReport r = compare_particle_vs_ridk(c, 1, 5);
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.particle_b[i], 0.1);
    EXPECT_NEAR(r.ridk_b[i], 0.1, 1e-10);
  }
  EXPECT_TRUE(r.particle_b_monotone);
}

TEST(Compare, ParticleBMassNonDecreasing) {
  const RunConfig c = preset_config("twod_react", {"reaction.n_a=900", "reaction.n_b=100", "reaction.kappa=2",
                                                   "reaction.radius=0.3", "discretization.nx=8",
                                                   "discretization.ny=8", "discretization.t_end=1",
                                                   "output.snapshot_times="});
  const ComparisonReport r = compare_particle_vs_ridk(c, 2, 10);
  EXPECT_TRUE(r.particle_b_monotone);
  EXPECT_GT(r.particle_b.back(), r.particle_b.front());
  EXPECT_GT(r.ridk_b.back(), r.ridk_b.front());
}

TEST(Noise, CovarianceWithinStandardErrors) {
  const std::vector<std::pair<Vec, Vec>> pairs = {{Vec(0, 0), Vec(0, 0)}, {Vec(1.0, 0), Vec(1.05, 0)}};
  for (const auto& c : covariance_check(0.1, 0.1, 1, pairs, 4000, 3))
    EXPECT_LE(std::abs(c.empirical - c.expected), 4 * c.standard_error);
}

TEST(Noise, LibraryQuadratureMatchesBesselRatios) {
  const auto r = bessel_ratios(20, 1.0 / (2 * 0.1 * 0.1));
  for (int j = 0; j <= 20; ++j) EXPECT_NEAR(lambda_quadrature(j, 0.1), r[static_cast<std::size_t>(j)], 1e-12);
}

TEST(Refinement, CoupledNoiseDifferenceIsFinite) {
  const RunConfig c = preset_config("fig_intro", {"discretization.t_end=0.1", "output.snapshot_times="});
  const double e = coupled_refinement(c, 32, 1, 20);
  EXPECT_TRUE(std::isfinite(e));
  EXPECT_GT(e, 0.0);
}

TEST(Invariants, SuitePasses) {
  for (const auto& r : invariant_suite()) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
}
