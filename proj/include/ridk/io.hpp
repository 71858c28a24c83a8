#pragma once

// On-disk formats: diagnostics.csv, binary RIDKSNAP snapshots and the meta file.

#include "ridk/common.hpp"
#include "ridk/config.hpp"
#include "ridk/fespace.hpp"
#include "ridk/solver.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace ridk {

inline constexpr const char* kVersion = "0.1.0";

inline std::string format_row(std::initializer_list<double> values) {
  std::string s;
  char buf[40];
  bool first = true;
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!first) s += ',';
    s += buf;
    first = false;
  }
  return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline std::string diagnostics_csv(const std::vector<Diagnostics>& rows) {
  std::string s = "t,mass,min_rho,l2_rho,l2_j,energy\n";
  for (const auto& d : rows) s += format_row({d.t, d.mass, d.min_rho, d.l2_rho, d.l2_j, d.energy}) + "\n";
  return s;
}

inline void write_diagnostics(const std::filesystem::path& path, const std::vector<Diagnostics>& rows) {
  write_text(path, diagnostics_csv(rows));
}

namespace detail {
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}
inline void put_f64(std::string& out, double x) {
  std::uint64_t v = 0;
  std::memcpy(&v, &x, sizeof v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}
inline std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw ValidationError("snapshot truncated");
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  pos += 4;
  return v;
}
inline double get_f64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw ValidationError("snapshot truncated");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  pos += 8;
  double x = 0.0;
  std::memcpy(&x, &v, sizeof x);
  return x;
}
}  // namespace detail

struct SnapshotFile {
  int dimension = 1;
  int q = 0;
  std::vector<int> cells;  // n, or nx and ny
  double t = 0.0;
  Eigen::VectorXd rho;
  Eigen::VectorXd j;
};

/// "RIDKSNAP", int32 dimension, q, n | nx ny, rho and j dof counts, f64 time, f64 coefficients.
inline std::string encode_snapshot(const Discretization& d, const std::vector<int>& cells, const Snapshot& s) {
  std::string out = "RIDKSNAP";
  detail::put_u32(out, static_cast<std::uint32_t>(d.dimension()));
  detail::put_u32(out, static_cast<std::uint32_t>(d.order()));
  for (int c : cells) detail::put_u32(out, static_cast<std::uint32_t>(c));
  detail::put_u32(out, static_cast<std::uint32_t>(s.u.rho.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(s.u.j.size()));
  detail::put_f64(out, s.t);
  for (Eigen::Index i = 0; i < s.u.rho.size(); ++i) detail::put_f64(out, s.u.rho[i]);
  for (Eigen::Index i = 0; i < s.u.j.size(); ++i) detail::put_f64(out, s.u.j[i]);
  return out;
}

inline SnapshotFile decode_snapshot(const std::string& in) {
  if (in.size() < 8 || in.compare(0, 8, "RIDKSNAP") != 0) throw ValidationError("snapshot: bad magic");
  std::size_t pos = 8;
  SnapshotFile f;
  f.dimension = static_cast<int>(detail::get_u32(in, pos));
  if (f.dimension != 1 && f.dimension != 2) throw ValidationError("snapshot: bad dimension");
  f.q = static_cast<int>(detail::get_u32(in, pos));
  for (int l = 0; l < f.dimension; ++l) f.cells.push_back(static_cast<int>(detail::get_u32(in, pos)));
  const std::uint32_t nr = detail::get_u32(in, pos), nj = detail::get_u32(in, pos);
  f.t = detail::get_f64(in, pos);
  if (in.size() != pos + 8 * (static_cast<std::size_t>(nr) + nj)) throw ValidationError("snapshot: size mismatch");
  f.rho.resize(nr);
  f.j.resize(nj);
  for (std::uint32_t i = 0; i < nr; ++i) f.rho[i] = detail::get_f64(in, pos);
  for (std::uint32_t i = 0; i < nj; ++i) f.j[i] = detail::get_f64(in, pos);
  return f;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline std::vector<int> mesh_cells(const RunConfig& c) {
  return c.dimension == 1 ? std::vector<int>{c.n} : std::vector<int>{c.nx, c.ny};
}

inline void write_snapshots(const std::filesystem::path& dir, const Discretization& d, const std::vector<int>& cells,
                            const std::vector<Snapshot>& snaps) {
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.dat", i);
    write_text(dir / name, encode_snapshot(d, cells, snaps[i]));
  }
}

inline std::string meta_text(const RunConfig& c, const std::vector<std::uint64_t>& seeds) {
  std::string s = echo_config(c);
  s += "\n";
  for (auto seed : seeds) s += "seed=" + std::to_string(seed) + "\n";
  s += "version=" + std::string(kVersion) + "\n";
  return s;
}

inline void write_run(const std::filesystem::path& dir, const Discretization& d, const std::vector<int>& cells,
                      const RunOutput& out) {
  std::filesystem::create_directories(dir);
  write_diagnostics(dir / "diagnostics.csv", out.diagnostics);
  write_snapshots(dir, d, cells, out.snapshots);
}

}  // namespace ridk
