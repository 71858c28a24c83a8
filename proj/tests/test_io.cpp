#include "ridk/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace ridk;

TEST(Snapshot, RoundTrip1D) {
  Discretization d(build_interval(5), 1);
  Snapshot s{0.25, {Eigen::VectorXd::LinSpaced(10, -1.0, 1.0), Eigen::VectorXd::LinSpaced(10, 0.1, 2.0)}};
  const std::string bytes = encode_snapshot(d, {5}, s);
  EXPECT_EQ(bytes.substr(0, 8), "RIDKSNAP");
  EXPECT_EQ(bytes.size(), 8u + 4 * 5 + 8 + 8 * 20);
  const SnapshotFile f = decode_snapshot(bytes);
  EXPECT_EQ(f.dimension, 1);
  EXPECT_EQ(f.q, 1);
  EXPECT_EQ(f.cells, std::vector<int>{5});
  EXPECT_EQ(f.t, 0.25);
  EXPECT_EQ(f.rho, s.u.rho);
  EXPECT_EQ(f.j, s.u.j);
}

TEST(Snapshot, LittleEndianLayout) {
  Discretization d(build_torus2d(2, 3), 0);
  const int nr = d.rho_space().num_dofs(), nj = d.j_space().num_dofs();
  Snapshot s{1.0, {Eigen::VectorXd::Zero(nr), Eigen::VectorXd::Zero(nj)}};
  const std::string b = encode_snapshot(d, {2, 3}, s);
  EXPECT_EQ(static_cast<unsigned char>(b[8]), 2u);
  EXPECT_EQ(static_cast<unsigned char>(b[9]), 0u);
  EXPECT_EQ(static_cast<unsigned char>(b[16]), 2u);
  EXPECT_EQ(static_cast<unsigned char>(b[20]), 3u);
  EXPECT_EQ(static_cast<unsigned char>(b[24]), static_cast<unsigned>(nr));
  // 1.0 = 0x3FF0000000000000, least significant byte first.
  EXPECT_EQ(static_cast<unsigned char>(b[39]), 0x3Fu);
  EXPECT_EQ(static_cast<unsigned char>(b[38]), 0xF0u);
  EXPECT_EQ(decode_snapshot(b).cells, (std::vector<int>{2, 3}));
}

TEST(Snapshot, RejectsCorruptInput) {
  Discretization d(build_interval(3), 0);
  const std::string b = encode_snapshot(d, {3}, {0.0, {Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3)}});
  EXPECT_THROW(decode_snapshot("NOTASNAP" + b.substr(8)), ValidationError);
  EXPECT_THROW(decode_snapshot(b.substr(0, b.size() - 1)), ValidationError);
  EXPECT_THROW(decode_snapshot(b + "x"), ValidationError);
}

TEST(Diagnostics, CsvHeaderAndPrecision) {
  const std::string s = diagnostics_csv({{0.1, 1.0 / 3.0, -0.5, 1.0, 2.0, 3.0}});
  EXPECT_EQ(s, "t,mass,min_rho,l2_rho,l2_j,energy\n0.10000000000000001,0.33333333333333331,-0.5,1,2,3\n");
}

TEST(Meta, CarriesConfigSeedsAndVersion) {
  const RunConfig c = preset_config("fig_intro");
  const std::string m = meta_text(c, {3, 7});
  EXPECT_NE(m.find("[model]"), std::string::npos);
  EXPECT_NE(m.find("seed=3\nseed=7\n"), std::string::npos);
  EXPECT_NE(m.find(std::string("version=") + kVersion), std::string::npos);
}

TEST(Run, RerunIsByteIdentical) {
  const RunConfig c = preset_config("fig_intro", {"discretization.n=32", "discretization.t_end=0.05",
                                                  "output.snapshot_times=0,0.05"});
  auto d = make_discretization(c.mesh(), c.q);
  Stepper st(d, c.coefficients(), c.variant(), c.dt, c.epsilon);
  const StatePair u0 = initial_state(*d, [](const Vec& x) { return std::make_pair(1.0 + 0.1 * std::sin(x[0]), Vec(0, 0)); });
  const auto dir = std::filesystem::temp_directory_path() / "ridk_io_test";
  std::filesystem::remove_all(dir);
  write_run(dir / "a", *d, mesh_cells(c), run_from(st, u0, c.grid(), 5));
  write_run(dir / "b", *d, mesh_cells(c), run_from(st, u0, c.grid(), 5));
  for (const char* f : {"diagnostics.csv", "snapshot_0000.dat", "snapshot_0001.dat"})
    EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
  const SnapshotFile last = decode_snapshot(read_file(dir / "a" / "snapshot_0001.dat"));
  EXPECT_DOUBLE_EQ(last.t, 0.05);
  std::filesystem::remove_all(dir);
}
