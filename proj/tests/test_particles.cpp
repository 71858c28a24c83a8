#include "ridk/particles.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ridk;

namespace {

ParticleSystem random_system(std::mt19937& gen, int d, int n) {
  std::uniform_real_distribution<double> x(0.0, kTwoPi);
  ParticleSystem s;
  s.dimension = d;
  for (int i = 0; i < n; ++i) {
    s.q.push_back(Vec(x(gen), d == 2 ? x(gen) : 0.0));
    s.p.push_back(Vec::Zero());
    s.type.push_back(gen() % 3 == 0 ? Species::B : Species::A);
  }
  return s;
}

}  // namespace

TEST(Reaction, CellListMatchesBruteForce) {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> radius(0.05, 2.5);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 2;
    ParticleSystem a = random_system(gen, d, 50 + static_cast<int>(gen() % 400));
    ParticleSystem b = a;
    const double r = radius(gen);
    const auto u = reaction_draws(a.size(), 7, static_cast<std::uint64_t>(trial));
    ASSERT_EQ(reaction_candidates(a, r), oracle::brute_force_candidates(a, r)) << "trial " << trial;
    const int fa = apply_flips(a, reaction_candidates(a, r), u, 3.0, 0.1);
    const int fb = apply_flips(b, oracle::brute_force_candidates(b, r), u, 3.0, 0.1);
    EXPECT_EQ(fa, fb);
    EXPECT_EQ(a.type, b.type);
  }
}

TEST(Reaction, FlipsUseConfigurationBeforeStep) {
  // A0 sits next to B; A1 is only near A0. A1 must not react in the same pass.
  ParticleSystem s;
  s.dimension = 1;
  s.q = {Vec(1.0, 0), Vec(1.1, 0), Vec(1.2, 0)};
  s.p.assign(3, Vec::Zero());
  s.type = {Species::B, Species::A, Species::A};
  const auto c = reaction_candidates(s, 0.15);
  EXPECT_EQ(c, (std::vector<bool>{false, true, false}));
  apply_flips(s, c, {0.0, 0.0, 0.0}, 1e6, 1.0);
  EXPECT_EQ(s.type, (std::vector<Species>{Species::B, Species::B, Species::A}));
}

TEST(Reaction, WrapsAcrossTheBoundary) {
  ParticleSystem s;
  s.dimension = 2;
  s.q = {Vec(0.02, 3.0), Vec(kTwoPi - 0.02, 3.0)};
  s.p.assign(2, Vec::Zero());
  s.type = {Species::A, Species::B};
  EXPECT_EQ(reaction_candidates(s, 0.05), (std::vector<bool>{true, false}));
}

TEST(Reaction, ZeroRateAndCountsConserved) {
  std::mt19937 gen(3);
  ParticleSystem s = random_system(gen, 2, 300);
  const int n = s.size(), b0 = s.count(Species::B);
  EXPECT_EQ(react(s, {0.0, 0.3}, 0.01, 1, 1), 0);
  EXPECT_EQ(s.count(Species::B), b0);
  for (int k = 1; k <= 20; ++k) react(s, {5.0, 0.3}, 0.01, 1, static_cast<std::uint64_t>(k));
  EXPECT_GE(s.count(Species::B), b0);
  EXPECT_EQ(s.count(Species::A) + s.count(Species::B), n);
}

TEST(Reaction, RejectsBadParameters) {
  EXPECT_THROW(ReactionParams({-1.0, 0.1}).validate(), ValidationError);
  EXPECT_THROW(ReactionParams({1.0, 0.0}).validate(), ValidationError);
  EXPECT_THROW(ReactionParams({1.0, 4.0}).validate(), ValidationError);
}

TEST(Langevin, FreeFlightWithoutNoiseOrFriction) {
  ParticleSystem s;
  s.dimension = 1;
  s.q = {Vec(6.0, 0)};
  s.p = {Vec(1.0, 0)};
  s.type = {Species::A};
  const Potential zero;
  langevin_step(s, 0.0, 0.0, zero, 0.5, 1, 1);
  EXPECT_NEAR(s.q[0][0], 6.5 - kTwoPi, 1e-14);
  EXPECT_DOUBLE_EQ(s.p[0][0], 1.0);
}

TEST(Langevin, EquilibriumMomentumVariance) {
  const double gamma = 1.0, sigma = 0.5, dt = 0.01;
  ParticleSystem s = sample_initial(2, {2000, Vec(3.0, 3.0), 1.0}, {0, Vec::Zero(), 1.0}, 5);
  const Potential v("cos(x)+sin(y)");
  double acc = 0.0;
  int samples = 0;
  for (int k = 1; k <= 2000; ++k) {
    langevin_step(s, gamma, sigma, v, dt, 9, static_cast<std::uint64_t>(k));
    if (k >= 500 && k % 100 == 0) {
      for (const auto& p : s.p) acc += p[0] * p[0] + p[1] * p[1];
      samples += 2 * s.size();
    }
  }
  const double kbt = sigma * sigma / (2.0 * gamma);
  EXPECT_NEAR(acc / samples / kbt, 1.0, 0.05);
}

TEST(Langevin, SeedDeterminism) {
  ParticleSystem a = sample_initial(1, {100, Vec(1.0, 0), 0.5}, {10, Vec(4.0, 0), 0.5}, 2);
  ParticleSystem b = a;
  const Potential v("cos(x)");
  for (int k = 1; k <= 10; ++k) {
    langevin_step(a, 0.3, 0.2, v, 0.01, 4, static_cast<std::uint64_t>(k));
    langevin_step(b, 0.3, 0.2, v, 0.01, 4, static_cast<std::uint64_t>(k));
  }
  for (int i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.q[static_cast<std::size_t>(i)], b.q[static_cast<std::size_t>(i)]);
    EXPECT_EQ(a.p[static_cast<std::size_t>(i)], b.p[static_cast<std::size_t>(i)]);
  }
}

TEST(Density, UnitMassPerParticle) {
  ParticleSystem s = sample_initial(1, {40, Vec(2.0, 0), 0.3}, {10, Vec(5.0, 0), 0.3}, 1);
  std::vector<Vec> pts;
  const int m = 2000;
  for (int i = 0; i < m; ++i) pts.push_back(Vec((i + 0.5) * kTwoPi / m, 0));
  const DensitySample all = empirical_density(s, 0.1, pts);
  const Species b = Species::B;
  const DensitySample only_b = empirical_density(s, 0.1, pts, &b);
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < m; ++i) {
    ma += all.rho[static_cast<std::size_t>(i)] * kTwoPi / m;
    mb += only_b.rho[static_cast<std::size_t>(i)] * kTwoPi / m;
  }
  EXPECT_NEAR(ma, 1.0, 1e-10);
  EXPECT_NEAR(mb, 0.2, 1e-10);
}

TEST(Initial, WrappedGaussianIntegratesToOne) {
  double m = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) m += wrapped_gaussian_pdf(Vec((i + 0.5) * kTwoPi / n, 0), Vec(0.3, 0), 0.8, 1) * kTwoPi / n;
  EXPECT_NEAR(m, 1.0, 1e-10);
}
