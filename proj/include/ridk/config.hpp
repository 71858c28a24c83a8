#pragma once

// INI run configuration: parsing with line-numbered errors, named presets,
// --override handling and the canonical echo written to `meta`.

#include "ridk/common.hpp"
#include "ridk/multispecies.hpp"
#include "ridk/particles.hpp"
#include "ridk/potential.hpp"
#include "ridk/solver.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace ridk {

struct RunConfig {
  // [model]
  double gamma = 0.25;
  double sigma = 0.25;
  double epsilon = 0.05;
  double n_particles = 1000.0;
  double delta = 0.0;
  std::string potential = "0";
  // [variant]
  std::string kind = "base";
  double d0 = 0.0;
  double tau = 0.0;
  // [discretization]
  int dimension = 1;
  int q = 0;
  int n = 64;
  int nx = 16;
  int ny = 16;
  double dt = 1e-3;
  double t_end = 1.0;
  // [initial]
  std::string rho = "1/(2*pi)";
  // [noise]
  int truncation = -1;  // -1: automatic
  std::vector<std::uint64_t> seeds{1};
  // [reaction]
  bool reaction = false;
  double kappa = 0.2;
  double radius = 0.15;
  double rho_th = 0.012;
  int n_a = 4500;
  int n_b = 500;
  Vec mean_a = Vec(4.5, 1.5);
  Vec mean_b = Vec(4.2, 5.0);
  double sd_a = 0.8;
  double sd_b = 0.25;
  // [output]
  std::string directory = "out";
  std::vector<double> snapshot_times;

  bool operator==(const RunConfig&) const = default;

  RidkParams model() const {
    RidkParams p;
    p.gamma = gamma;
    p.sigma = sigma;
    p.epsilon = epsilon;
    p.n_particles = n_particles;
    p.delta = delta;
    p.potential = Potential(potential);
    return p;
  }
  Variant variant() const {
    if (kind == "diffusion") return Variant::extra_diffusion(d0);
    if (kind == "tau") return Variant::time_scale_switch(tau);
    return Variant::base();
  }
  Mesh mesh() const { return dimension == 1 ? build_interval(n) : build_torus2d(nx, ny); }
  RunGrid grid() const { return {dt, t_end, snapshot_times, false}; }
  Coefficients coefficients() const {
    Coefficients c = Coefficients::from(model());
    c.truncation = truncation;
    return c;
  }
  CouplingParams coupling() const { return {kappa, radius, static_cast<double>(n_a + n_b), rho_th}; }
  SpeciesInit species_a() const { return {n_a, mean_a, sd_a}; }
  SpeciesInit species_b() const { return {n_b, mean_b, sd_b}; }
};

namespace detail {

struct IniValue {
  std::string value;
  int line = 0;  // 0: preset or override
};
using IniMap = std::map<std::string, std::map<std::string, IniValue>>;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string where(const std::string& section, const std::string& key, int line) {
  std::string w = "[" + section + "] " + key;
  if (line > 0) w = "line " + std::to_string(line) + ": " + w;
  return w;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"model", {"gamma", "sigma", "epsilon", "n_particles", "delta", "potential"}},
      {"variant", {"kind", "d0", "tau"}},
      {"discretization", {"dimension", "q", "n", "nx", "ny", "dt", "t_end"}},
      {"initial", {"rho"}},
      {"noise", {"truncation", "seeds"}},
      {"reaction", {"kappa", "radius", "rho_th", "n_a", "n_b", "mean_a", "mean_b", "sd_a", "sd_b"}},
      {"output", {"directory", "snapshot_times"}},
  };
  return s;
}

inline void set_entry(IniMap& m, const std::string& section, const std::string& key, const std::string& value,
                      int line) {
  const auto& s = schema();
  const auto it = s.find(section);
  if (it == s.end()) {
    throw ValidationError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + "unknown section [" +
                          section + "]");
  }
  if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
    throw ValidationError(where(section, key, line) + ": unknown key");
  }
  m[section][key] = {value, line};
}

inline IniMap preset_map(const std::string& name) {
  IniMap m;
  auto put = [&](const std::string& s, const std::string& k, const std::string& v) { set_entry(m, s, k, v, 0); };
  auto one_d = [&] {
    put("model", "gamma", "0.25");
    put("model", "sigma", "0.25");
    put("model", "epsilon", "0.05");
    put("model", "n_particles", "1000");
    put("model", "potential", "0.5*cos(x)^2");
    put("discretization", "dimension", "1");
    put("discretization", "q", "0");
    put("discretization", "n", "256");
    put("discretization", "dt", "1e-3");
    put("discretization", "t_end", "10");
    put("initial", "rho", "(1+x)/(2*pi*(1+pi))");
    put("noise", "seeds", "1,2,3,4,5,6,7,8,9,10");
    put("output", "snapshot_times", "0,2.5,5,7.5,10");
  };
  auto two_d = [&] {
    put("model", "gamma", "0.3");
    put("model", "sigma", "0.2");
    put("model", "epsilon", "0.05");
    put("model", "n_particles", "5000");
    put("model", "potential", "(cos(y/2)^2 + 2*cos(1+x/2)^2)/8");
    put("discretization", "dimension", "2");
    put("discretization", "q", "0");
    put("discretization", "nx", "32");
    put("discretization", "ny", "32");
    put("discretization", "dt", "1e-2");
    put("discretization", "t_end", "25");
    put("noise", "seeds", "1,2,3");
    put("reaction", "kappa", "0.2");
    put("reaction", "radius", "0.15");
    put("reaction", "rho_th", "0.012");
    put("reaction", "n_a", "4500");
    put("reaction", "n_b", "500");
    put("reaction", "mean_a", "4.5,1.5");
    put("reaction", "mean_b", "4.2,5");
    put("reaction", "sd_a", "0.8");
    put("reaction", "sd_b", "0.25");
    put("output", "snapshot_times", "0,10,12,25");
  };
  if (name == "fig_intro") {
    one_d();
  } else if (name == "fig_diffusion") {
    one_d();
    put("variant", "kind", "diffusion");
    put("variant", "d0", "0.5");
  } else if (name == "fig_tau") {
    one_d();
    put("variant", "kind", "tau");
    put("variant", "tau", "0.2");
  } else if (name == "twod_react") {
    two_d();
  } else if (name == "twod_react_tau") {
    two_d();
    put("variant", "kind", "tau");
    put("variant", "tau", "0.05");
  } else {
    throw ValidationError("unknown preset '" + name + "'");
  }
  return m;
}

/// Reads sections and keys; a leading `preset = name` seeds the map.
inline IniMap read_ini(const std::string& text) {
  IniMap m;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  bool any_entry = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto c = s.find_first_of("#;");
    if (c != std::string::npos) s = s.substr(0, c);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ValidationError("line " + std::to_string(line) + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!schema().count(section)) {
        throw ValidationError("line " + std::to_string(line) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty()) {
      if (key != "preset") throw ValidationError("line " + std::to_string(line) + ": key '" + key + "' outside a section");
      if (any_entry) throw ValidationError("line " + std::to_string(line) + ": preset must precede other keys");
      try {
        m = preset_map(value);
      } catch (const ValidationError& e) {
        throw ValidationError("line " + std::to_string(line) + ": " + e.what());
      }
      continue;
    }
    if (value.empty()) throw ValidationError(where(section, key, line) + ": empty value");
    set_entry(m, section, key, value, line);
    any_entry = true;
  }
  return m;
}

class Builder {
 public:
  explicit Builder(const IniMap& m) : m_(m) {}

  const IniValue* find(const std::string& s, const std::string& k) const {
    const auto it = m_.find(s);
    if (it == m_.end()) return nullptr;
    const auto jt = it->second.find(k);
    return jt == it->second.end() ? nullptr : &jt->second;
  }
  bool has(const std::string& s, const std::string& k) const { return find(s, k) != nullptr; }
  bool has_section(const std::string& s) const { return m_.count(s) > 0; }

  [[noreturn]] void fail(const std::string& s, const std::string& k, const std::string& why) const {
    const IniValue* v = find(s, k);
    throw ValidationError(where(s, k, v ? v->line : 0) + ": " + why);
  }

  void real(const std::string& s, const std::string& k, double& out) const {
    const IniValue* v = find(s, k);
    if (!v) return;
    std::size_t pos = 0;
    try {
      out = std::stod(v->value, &pos);
    } catch (const std::exception&) {
      fail(s, k, "not a number: '" + v->value + "'");
    }
    if (pos != v->value.size() || !std::isfinite(out)) fail(s, k, "not a number: '" + v->value + "'");
  }
  void integer(const std::string& s, const std::string& k, int& out) const {
    const IniValue* v = find(s, k);
    if (!v) return;
    std::size_t pos = 0;
    try {
      out = std::stoi(v->value, &pos);
    } catch (const std::exception&) {
      fail(s, k, "not an integer: '" + v->value + "'");
    }
    if (pos != v->value.size()) fail(s, k, "not an integer: '" + v->value + "'");
  }
  void text(const std::string& s, const std::string& k, std::string& out) const {
    if (const IniValue* v = find(s, k)) out = v->value;
  }
  void reals(const std::string& s, const std::string& k, std::vector<double>& out) const {
    const IniValue* v = find(s, k);
    if (!v) return;
    out.clear();
    for (const auto& item : split_list(v->value)) {
      std::size_t pos = 0;
      double x = 0.0;
      try {
        x = std::stod(item, &pos);
      } catch (const std::exception&) {
        fail(s, k, "not a number: '" + item + "'");
      }
      if (pos != item.size() || !std::isfinite(x)) fail(s, k, "not a number: '" + item + "'");
      out.push_back(x);
    }
  }
  void point(const std::string& s, const std::string& k, Vec& out, int d) const {
    std::vector<double> v;
    reals(s, k, v);
    if (!has(s, k)) return;
    if (static_cast<int>(v.size()) != d) fail(s, k, "expected " + std::to_string(d) + " components");
    out = Vec::Zero();
    for (int l = 0; l < d; ++l) out[l] = v[static_cast<std::size_t>(l)];
  }
  void check(bool ok, const std::string& s, const std::string& k, const std::string& why) const {
    if (!ok) fail(s, k, why);
  }

 private:
  const IniMap& m_;
};

inline bool divides(double t, double dt) {
  const double r = t / dt;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

inline RunConfig build(const IniMap& m) {
  const Builder b(m);
  RunConfig c;
  b.check(b.has_section("discretization") && b.has("discretization", "dimension"), "discretization", "dimension",
          "missing required key");
  b.integer("discretization", "dimension", c.dimension);
  b.check(c.dimension == 1 || c.dimension == 2, "discretization", "dimension", "must be 1 or 2");
  if (c.dimension == 1) {
    b.check(b.has("discretization", "n"), "discretization", "n", "missing required key");
  } else {
    b.check(b.has("discretization", "nx"), "discretization", "nx", "missing required key");
    b.check(b.has("discretization", "ny"), "discretization", "ny", "missing required key");
  }
  if (c.dimension == 2) c.dt = 1e-2;

  b.real("model", "gamma", c.gamma);
  b.check(c.gamma > 0.0, "model", "gamma", "must be positive");
  b.real("model", "sigma", c.sigma);
  b.check(c.sigma >= 0.0, "model", "sigma", "must be non-negative");
  b.real("model", "epsilon", c.epsilon);
  b.check(c.epsilon > 0.0, "model", "epsilon", "must be positive");
  b.real("model", "n_particles", c.n_particles);
  b.check(c.n_particles > 0.0, "model", "n_particles", "must be positive");
  b.real("model", "delta", c.delta);
  b.check(c.delta >= 0.0, "model", "delta", "must be non-negative");
  b.text("model", "potential", c.potential);
  try {
    Potential p(c.potential);
  } catch (const ValidationError& e) {
    b.fail("model", "potential", e.what());
  }

  b.text("variant", "kind", c.kind);
  b.check(c.kind == "base" || c.kind == "diffusion" || c.kind == "tau", "variant", "kind",
          "must be base, diffusion or tau");
  b.real("variant", "d0", c.d0);
  b.check(c.d0 >= 0.0, "variant", "d0", "must be non-negative");
  b.check(c.kind != "diffusion" || c.d0 > 0.0, "variant", "d0", "must be positive for kind = diffusion");
  b.real("variant", "tau", c.tau);
  b.check(c.tau >= 0.0, "variant", "tau", "must be non-negative");
  b.check(c.kind != "tau" || c.tau > 0.0, "variant", "tau", "must be positive for kind = tau");

  b.integer("discretization", "q", c.q);
  b.check(c.q >= 0 && c.q <= (c.dimension == 1 ? 2 : 0), "discretization", "q",
          c.dimension == 1 ? "must be 0, 1 or 2" : "must be 0 in two dimensions");
  b.integer("discretization", "n", c.n);
  b.check(c.n >= 1, "discretization", "n", "must be at least 1");
  b.integer("discretization", "nx", c.nx);
  b.check(c.nx >= 2, "discretization", "nx", "must be at least 2");
  b.integer("discretization", "ny", c.ny);
  b.check(c.ny >= 2, "discretization", "ny", "must be at least 2");
  b.real("discretization", "dt", c.dt);
  b.check(c.dt > 0.0, "discretization", "dt", "must be positive");
  b.real("discretization", "t_end", c.t_end);
  b.check(c.t_end > 0.0, "discretization", "t_end", "must be positive");
  b.check(divides(c.t_end, c.dt), "discretization", "t_end", "must be a multiple of dt");

  b.text("initial", "rho", c.rho);
  try {
    Potential p(c.rho);
  } catch (const ValidationError& e) {
    b.fail("initial", "rho", e.what());
  }

  if (const IniValue* v = b.find("noise", "truncation")) {
    if (v->value == "auto") {
      c.truncation = -1;
    } else {
      b.integer("noise", "truncation", c.truncation);
      b.check(c.truncation >= 0, "noise", "truncation", "must be auto or a non-negative integer");
    }
  }
  if (const IniValue* v = b.find("noise", "seeds")) {
    c.seeds.clear();
    for (const auto& item : split_list(v->value)) {
      std::size_t pos = 0;
      unsigned long long s = 0;
      try {
        s = std::stoull(item, &pos);
      } catch (const std::exception&) {
        b.fail("noise", "seeds", "not a seed: '" + item + "'");
      }
      if (pos != item.size() || item.front() == '-') b.fail("noise", "seeds", "not a seed: '" + item + "'");
      c.seeds.push_back(s);
    }
    b.check(!c.seeds.empty(), "noise", "seeds", "needs at least one seed");
  }

  c.reaction = b.has_section("reaction");
  if (c.reaction) {
    b.real("reaction", "kappa", c.kappa);
    b.check(c.kappa >= 0.0, "reaction", "kappa", "must be non-negative");
    b.real("reaction", "radius", c.radius);
    b.check(c.radius > 0.0 && c.radius < kPi, "reaction", "radius", "must lie in (0, pi)");
    b.real("reaction", "rho_th", c.rho_th);
    b.check(c.rho_th >= 0.0, "reaction", "rho_th", "must be non-negative");
    b.integer("reaction", "n_a", c.n_a);
    b.check(c.n_a >= 0, "reaction", "n_a", "must be non-negative");
    b.integer("reaction", "n_b", c.n_b);
    b.check(c.n_b >= 0, "reaction", "n_b", "must be non-negative");
    b.check(c.n_a + c.n_b > 0, "reaction", "n_b", "needs at least one particle");
    if (c.dimension == 1) {
      c.mean_a = Vec(c.mean_a[0], 0.0);
      c.mean_b = Vec(c.mean_b[0], 0.0);
    }
    b.point("reaction", "mean_a", c.mean_a, c.dimension);
    b.point("reaction", "mean_b", c.mean_b, c.dimension);
    b.real("reaction", "sd_a", c.sd_a);
    b.check(c.sd_a > 0.0, "reaction", "sd_a", "must be positive");
    b.real("reaction", "sd_b", c.sd_b);
    b.check(c.sd_b > 0.0, "reaction", "sd_b", "must be positive");
  }

  b.text("output", "directory", c.directory);
  b.reals("output", "snapshot_times", c.snapshot_times);
  for (double t : c.snapshot_times) {
    b.check(t >= 0.0 && t <= c.t_end * (1 + 1e-12), "output", "snapshot_times", "must lie in [0, t_end]");
    b.check(divides(t, c.dt), "output", "snapshot_times", "must be multiples of dt");
  }
  return c;
}

}  // namespace detail

/// Applies `section.key=value` on top of a parsed map.
inline void apply_override(detail::IniMap& m, const std::string& spec) {
  const auto eq = spec.find('=');
  const auto dot = spec.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ValidationError("override '" + spec + "': expected section.key=value");
  }
  detail::set_entry(m, detail::trim(spec.substr(0, dot)), detail::trim(spec.substr(dot + 1, eq - dot - 1)),
                    detail::trim(spec.substr(eq + 1)), 0);
}

inline RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {}) {
  detail::IniMap m = detail::read_ini(text);
  for (const auto& o : overrides) apply_override(m, o);
  return detail::build(m);
}

inline RunConfig preset_config(const std::string& name, const std::vector<std::string>& overrides = {}) {
  return parse_config("preset = " + name + "\n", overrides);
}

/// Canonical text of the effective configuration; parses back to an equal RunConfig.
inline std::string echo_config(const RunConfig& c) {
  using detail::fmt;
  std::ostringstream o;
  o << "[model]\n"
    << "gamma = " << fmt(c.gamma) << "\n"
    << "sigma = " << fmt(c.sigma) << "\n"
    << "epsilon = " << fmt(c.epsilon) << "\n"
    << "n_particles = " << fmt(c.n_particles) << "\n"
    << "delta = " << fmt(c.delta) << "\n"
    << "potential = " << c.potential << "\n"
    << "\n[variant]\n"
    << "kind = " << c.kind << "\n"
    << "d0 = " << fmt(c.d0) << "\n"
    << "tau = " << fmt(c.tau) << "\n"
    << "\n[discretization]\n"
    << "dimension = " << c.dimension << "\n"
    << "q = " << c.q << "\n"
    << "n = " << c.n << "\n"
    << "nx = " << c.nx << "\n"
    << "ny = " << c.ny << "\n"
    << "dt = " << fmt(c.dt) << "\n"
    << "t_end = " << fmt(c.t_end) << "\n"
    << "\n[initial]\n"
    << "rho = " << c.rho << "\n"
    << "\n[noise]\n"
    << "truncation = " << (c.truncation < 0 ? std::string("auto") : std::to_string(c.truncation)) << "\n"
    << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) o << (i ? "," : "") << c.seeds[i];
  o << "\n";
  if (c.reaction) {
    auto pt = [&](const Vec& v) {
      std::string s = fmt(v[0]);
      if (c.dimension == 2) s += "," + fmt(v[1]);
      return s;
    };
    o << "\n[reaction]\n"
      << "kappa = " << fmt(c.kappa) << "\n"
      << "radius = " << fmt(c.radius) << "\n"
      << "rho_th = " << fmt(c.rho_th) << "\n"
      << "n_a = " << c.n_a << "\n"
      << "n_b = " << c.n_b << "\n"
      << "mean_a = " << pt(c.mean_a) << "\n"
      << "mean_b = " << pt(c.mean_b) << "\n"
      << "sd_a = " << fmt(c.sd_a) << "\n"
      << "sd_b = " << fmt(c.sd_b) << "\n";
  }
  o << "\n[output]\n"
    << "directory = " << c.directory << "\n";
  if (!c.snapshot_times.empty()) {
    o << "snapshot_times = ";
    for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) o << (i ? "," : "") << fmt(c.snapshot_times[i]);
    o << "\n";
  }
  return o.str();
}

}  // namespace ridk
