// ridk: command-line driver for runs, refinement studies and checks.
//
// Exit status: 0 success, 1 invalid input, 2 numerical failure.

#include "ridk/harness.hpp"
#include "ridk/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ridk;

namespace {

struct Flags {
  std::string preset;
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--preset", f.preset, "named preset (fig_intro, fig_diffusion, fig_tau, twod_react, twod_react_tau)");
  cmd->add_option("--config", f.config, "INI configuration file");
  cmd->add_option("--seed", f.seeds, "seed list (replaces [noise] seeds)");
  cmd->add_option("--override", f.overrides, "section.key=value, repeatable")->allow_extra_args(false);
  cmd->add_option("--out", f.out, "output directory (replaces [output] directory)");
}

RunConfig load_config(const Flags& f) {
  if (!f.preset.empty() && !f.config.empty()) throw ValidationError("give either --preset or --config, not both");
  RunConfig c;
  if (!f.config.empty()) {
    if (!fs::exists(f.config)) throw ValidationError("config file not found: " + f.config);
    c = parse_config(read_file(f.config), f.overrides);
  } else if (!f.preset.empty()) {
    c = preset_config(f.preset, f.overrides);
  } else {
    throw ValidationError("a --preset or --config is required");
  }
  if (!f.seeds.empty()) c.seeds = f.seeds;
  if (!f.out.empty()) c.directory = f.out;
  return c;
}

std::string masses_csv(const TwoSpeciesOutput& o) {
  std::string s = "t,mass_a,mass_b,total,transferred\n";
  for (std::size_t i = 0; i < o.a.size(); ++i) {
    const double moved = i == 0 ? 0.0 : o.transferred[i - 1];
    s += format_row({o.a[i].t, o.a[i].mass, o.b[i].mass, o.a[i].mass + o.b[i].mass, moved}) + "\n";
  }
  return s;
}

int cmd_run(const Flags& f) {
  const RunConfig c = load_config(f);
  const fs::path dir = c.directory;
  fs::create_directories(dir);
  write_text(dir / "meta", meta_text(c, c.seeds));
  const ExperimentResult r = run_experiment(c, c.seeds);
  const std::vector<int> cells = mesh_cells(c);
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    const fs::path sd = dir / ("seed_" + std::to_string(c.seeds[i]));
    if (!c.reaction) {
      const RunOutput& o = r.runs[i];
      write_run(sd, *r.disc, cells, o);
      if (!o.switch_premise.empty()) {
        std::string log = "t,premise_holds\n";
        for (std::size_t n = 0; n < o.switch_premise.size(); ++n)
          log += format_row({static_cast<double>(n) * c.dt}) + (o.switch_premise[n] ? ",1\n" : ",0\n");
        write_text(sd / "switch_premise.csv", log);
      }
      continue;
    }
    const TwoSpeciesOutput& o = r.two_species[i];
    write_run(sd / "A", *r.disc, cells, RunOutput{o.a, o.snapshots_a, {}});
    write_run(sd / "B", *r.disc, cells, RunOutput{o.b, o.snapshots_b, {}});
    write_text(sd / "masses.csv", masses_csv(o));
  }
  std::string summary = "seed,min_rho,first_negative_t,max_mass_drift,max_b_mass,energy_non_increasing\n";
  for (const auto& s : r.summary) {
    char row[256];
    std::snprintf(row, sizeof row, "%llu,%.17g,%.17g,%.17g,%.17g,%s\n", static_cast<unsigned long long>(s.seed),
                  s.min_rho, s.first_negative_t, s.max_mass_drift, s.max_b_mass,
                  s.energy_checked ? (s.energy_non_increasing ? "yes" : "no") : "n/a");
    summary += row;
  }
  write_text(dir / "summary.csv", summary);
  std::cout << summary;
  for (const auto& s : r.summary) {
    if (s.max_mass_drift > 1e-10) throw NumericalError("mass drift above 1e-10 on seed " + std::to_string(s.seed));
    if (!s.energy_non_increasing) throw NumericalError("energy increased on seed " + std::to_string(s.seed));
  }
  return 0;
}

int cmd_convergence(const std::string& kind, int q, const std::vector<int>& levels, const std::string& out) {
  const ConvergenceReport r = convergence_study(kind, q, levels);
  std::string s = "n,h,error\n";
  for (std::size_t i = 0; i < r.errors.size(); ++i)
    s += std::to_string(r.resolutions[i]) + "," + format_row({r.h[i], r.errors[i]}) + "\n";
  std::cout << s;
  if (r.exact) {
    std::cout << "slope: exact (all errors <= 1e-10)\n";
  } else {
    std::printf("slope: %.4f (proven order %.2f)%s\n", r.slope, r.target, r.monotone ? "" : "  [non-monotone errors]");
  }
  if (!out.empty()) {
    fs::create_directories(out);
    write_text(fs::path(out) / "convergence.csv", s);
  }
  return 0;
}

int cmd_noise_check(double eps, int jmax, int samples, std::uint64_t seed) {
  require(eps > 0.0, "--epsilon must be positive");
  require(samples > 1, "--samples must exceed 1");
  const auto ratios = bessel_ratios(jmax, 1.0 / (2.0 * eps * eps));
  std::printf("%4s %24s %24s %10s\n", "j", "lambda (Bessel ratio)", "lambda (quadrature)", "abs diff");
  double worst = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    const double a = ratios[static_cast<std::size_t>(j)], b = lambda_quadrature(j, eps);
    worst = std::max(worst, std::abs(a - b));
    std::printf("%4d %24.17g %24.17g %10.2e\n", j, a, b, std::abs(a - b));
  }
  std::printf("max abs diff %.3e\n\n", worst);
  const std::vector<std::pair<Vec, Vec>> pairs = {{Vec(0.0, 0.0), Vec(0.0, 0.0)},
                                                   {Vec(0.0, 0.0), Vec(0.05, 0.0)},
                                                   {Vec(1.0, 0.0), Vec(1.1, 0.0)},
                                                   {Vec(2.0, 0.0), Vec(2.2, 0.0)},
                                                   {Vec(3.0, 0.0), Vec(6.0, 0.0)}};
  const auto cov = covariance_check(eps, 2.0 * kPi / 64.0, 1, pairs, samples, seed);
  std::printf("%8s %8s %14s %14s %10s %8s\n", "x", "y", "expected", "empirical", "std err", "z");
  int outside = 0;
  for (const auto& c : cov) {
    const double z = (c.empirical - c.expected) / c.standard_error;
    outside += std::abs(z) > 4.0;
    std::printf("%8.3f %8.3f %14.6e %14.6e %10.2e %8.2f\n", c.x[0], c.y[0], c.expected, c.empirical, c.standard_error, z);
  }
  return outside == 0 ? 0 : 2;
}

int cmd_particles(const Flags& f, int every) {
  const RunConfig c = load_config(f);
  require(c.reaction, "particles needs a [reaction] section (reaction = true)");
  const std::uint64_t seed = c.seeds.front();
  ParticleSystem s = sample_initial(c.dimension, c.species_a(), c.species_b(), seed);
  const Potential v(c.potential);
  const ReactionParams rp{c.kappa, c.radius};
  const int steps = step_count(c.t_end, c.dt);
  auto row = [&](int k) {
    double p2 = 0.0;
    for (const auto& p : s.p)
      for (int l = 0; l < s.dimension; ++l) p2 += p[l] * p[l];
    p2 /= static_cast<double>(s.size()) * s.dimension;
    return std::to_string(s.count(Species::A)) + "," + std::to_string(s.count(Species::B)) + "," +
           format_row({k * c.dt, p2}) + "\n";
  };
  std::string csv = "n_a,n_b,t,momentum_variance\n" + row(0);
  for (int k = 1; k <= steps; ++k) {
    langevin_step(s, c.gamma, c.sigma, v, c.dt, seed, static_cast<std::uint64_t>(k));
    react(s, rp, c.dt, seed, static_cast<std::uint64_t>(k));
    if (k % every == 0 || k == steps) csv += row(k);
  }
  const fs::path dir = c.directory;
  fs::create_directories(dir);
  write_text(dir / "meta", meta_text(c, {seed}));
  write_text(dir / "particles.csv", csv);
  std::printf("final: %d A, %d B; kBT = %.6g\n", s.count(Species::A), s.count(Species::B),
              c.sigma * c.sigma / (2.0 * c.gamma));
  return 0;
}

int cmd_compare(const Flags& f, int every) {
  const RunConfig c = load_config(f);
  const std::uint64_t seed = c.seeds.front();
  const ComparisonReport r = compare_particle_vs_ridk(c, seed, every);
  std::string csv = "t,particle_a,particle_b,ridk_a,ridk_b\n";
  for (std::size_t i = 0; i < r.t.size(); ++i)
    csv += format_row({r.t[i], r.particle_a[i], r.particle_b[i], r.ridk_a[i], r.ridk_b[i]}) + "\n";
  const fs::path dir = c.directory;
  fs::create_directories(dir);
  write_text(dir / "meta", meta_text(c, {seed}));
  write_text(dir / "compare.csv", csv);
  std::printf("sup |B_particle - B_ridk| = %.6g\nparticle B-mass non-decreasing: %s\nmax RIDK B-mass = %.12g\n",
              r.sup_distance_b, r.particle_b_monotone ? "yes" : "no", r.ridk_max_b);
  return 0;
}

int cmd_invariants() {
  int failed = 0;
  for (const auto& r : invariant_suite()) {
    std::printf("%-40s %s  %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIDK finite element laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Flags run_f, part_f, cmp_f;
  auto* run = app.add_subcommand("run", "run a preset or config and write diagnostics and snapshots");
  add_common(run, run_f);

  std::string kind = "ritz", conv_out;
  int q = 0;
  std::vector<int> levels{16, 32, 64, 128};
  auto* conv = app.add_subcommand("convergence", "refinement study with fitted slope");
  conv->add_option("--kind", kind, "ritz | deterministic")->check(CLI::IsMember({"ritz", "deterministic"}));
  conv->add_option("-q,--q", q, "polynomial degree")->check(CLI::Range(0, 4));
  conv->add_option("--levels", levels, "element counts, coarse to fine");
  conv->add_option("--out", conv_out, "directory for convergence.csv");

  double eps = 0.05;
  int jmax = 50, samples = 10000;
  std::uint64_t noise_seed = 1;
  auto* noise = app.add_subcommand("noise-check", "eigenvalues against quadrature and covariance Monte Carlo");
  noise->add_option("--epsilon", eps, "kernel width");
  noise->add_option("--jmax", jmax, "largest mode in the eigenvalue table")->check(CLI::Range(0, 400));
  noise->add_option("--samples", samples, "Monte Carlo sample count");
  noise->add_option("--seed", noise_seed, "seed");

  int every = 10;
  auto* part = app.add_subcommand("particles", "Langevin particles with A + B -> 2B reactions");
  add_common(part, part_f);
  part->add_option("--every", every, "output stride in steps")->check(CLI::PositiveNumber);

  auto* cmp = app.add_subcommand("compare", "particle and RIDK species masses on a common time grid");
  add_common(cmp, cmp_f);
  cmp->add_option("--every", every, "output stride in steps")->check(CLI::PositiveNumber);

  auto* inv = app.add_subcommand("invariants", "property suite with a pass/fail table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_f);
    if (*conv) return cmd_convergence(kind, q, levels, conv_out);
    if (*noise) return cmd_noise_check(eps, jmax, samples, noise_seed);
    if (*part) return cmd_particles(part_f, every);
    if (*cmp) return cmd_compare(cmp_f, every);
    if (*inv) return cmd_invariants();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
