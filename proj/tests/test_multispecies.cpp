#include "ridk/config.hpp"
#include "ridk/harness.hpp"
#include "ridk/multispecies.hpp"

#include <gtest/gtest.h>

using namespace ridk;

namespace {

RunConfig small_reacting(const std::vector<std::string>& extra = {}) {
  std::vector<std::string> o{"discretization.nx=8", "discretization.ny=8", "discretization.t_end=0.5",
                             "output.snapshot_times=0,0.5", "noise.seeds=1"};
  o.insert(o.end(), extra.begin(), extra.end());
  return preset_config("twod_react", o);
}

}  // namespace

TEST(Rate, ThresholdAndPositivePart) {
  const CouplingParams c{0.2, 0.15, 5000, 0.012};
  EXPECT_EQ(reaction_rate(0.1, 0.012, c), 0.0);
  EXPECT_EQ(reaction_rate(-0.1, 0.5, c), 0.0);
  EXPECT_DOUBLE_EQ(reaction_rate(0.1, 0.02, c), 0.2 * kPi * 0.15 * 0.15 * 5000 * 0.1 * 0.02);
  EXPECT_THROW((CouplingParams{-1.0, 0.1, 1, 0}).validate(), ValidationError);
}

TEST(TwoSpecies, TotalMassConservedWithNoise) {
  for (const char* kind : {"base", "tau"}) {
    const RunConfig c = small_reacting({std::string("variant.kind=") + kind, "variant.tau=0.02"});
    const ExperimentResult r = run_experiment(c, c.seeds);
    ASSERT_EQ(r.two_species.size(), 1u);
    EXPECT_LE(r.two_species[0].max_total_mass_drift(), 1e-10) << kind;
    EXPECT_GT(r.two_species[0].b.back().mass, r.two_species[0].b.front().mass) << kind;
    EXPECT_EQ(r.two_species[0].snapshots_b.size(), 2u);
  }
}

TEST(TwoSpecies, TransferAccountsForMassChange) {
  RunConfig c = small_reacting({"model.sigma=0", "model.potential=0"});
  auto d = make_discretization(c.mesh(), c.q);
  Coefficients coef;
  coef.kbt = 0.05;
  coef.gamma = 0.3;
  TwoSpeciesStepper st(d, coef, Variant::base(), c.coupling(), c.dt, std::nullopt);
  const TwoSpeciesOutput o = run_two_species(st, two_species_initial(*d, c), c.grid(), 1);
  double moved = 0.0;
  for (double m : o.transferred) moved += m;
  EXPECT_GT(moved, 0.0);
  EXPECT_NEAR(o.b.back().mass - o.b.front().mass, moved, 1e-12);
  EXPECT_NEAR(o.a.front().mass - o.a.back().mass, moved, 1e-12);
}

TEST(TwoSpecies, NoReactionKeepsSpeciesMass) {
  const RunConfig c = small_reacting({"reaction.kappa=0"});
  const ExperimentResult r = run_experiment(c, c.seeds);
  const auto& o = r.two_species[0];
  EXPECT_NEAR(o.b.front().mass, 0.1, 1e-12);
  for (const auto& d : o.b) EXPECT_NEAR(d.mass, 0.1, 1e-10);
}
