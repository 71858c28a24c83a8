#include "ridk/noise.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace ridk;

TEST(Philox, KnownAnswers) {
  // Reference vectors of the Philox4x32-10 generator.
  Counter r = philox4x32({0, 0, 0, 0}, 0);
  EXPECT_EQ(r[0], 0x6627e8d5u);
  EXPECT_EQ(r[1], 0xe169c58du);
  EXPECT_EQ(r[2], 0xbc57ac4cu);
  EXPECT_EQ(r[3], 0x9b00dbd8u);
  r = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, 0xffffffffffffffffull);
  EXPECT_EQ(r[0], 0x408f276du);
  EXPECT_EQ(r[1], 0x41c83b0eu);
  EXPECT_EQ(r[2], 0xa20bc7c6u);
  EXPECT_EQ(r[3], 0x6d5451fdu);
}

TEST(Philox, NormalMoments) {
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(42, make_counter(i, 0, 0, Stream::noise_a));
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Bessel, RatioAtZeroIsOne) {
  for (double x : {0.01, 1.0, 200.0, 1e4}) EXPECT_EQ(bessel_ratio(0, x), 1.0);
}

TEST(Bessel, SeriesOracle) {
  EXPECT_NEAR(bessel_ratio(1, 1.0), 0.4463900, 1e-6);
  for (int j : {1, 2, 5, 10, 30}) {
    for (double x : {0.5, 1.0, 4.0, 10.0}) {
      const double ref = oracle::bessel_i_series(j, x) / oracle::bessel_i_series(0, x);
      EXPECT_NEAR(bessel_ratio(j, x), ref, 1e-10 * ref) << j << " " << x;
    }
  }
}

TEST(Bessel, AgreesWithStandardLibrary) {
  for (int j : {1, 3, 17, 60, 200}) {
    for (double x : {2.0, 50.0, 200.0, 600.0}) {
      const double ref = std::cyl_bessel_i(static_cast<double>(j), x) / std::cyl_bessel_i(0.0, x);
      if (!std::isfinite(ref) || ref < 1e-290) continue;
      EXPECT_NEAR(bessel_ratio(j, x), ref, 1e-10 * ref) << j << " " << x;
    }
  }
}

TEST(Bessel, LargeArgumentUsesScaledSum) {
  // sum_{j in Z} I_j(x) = e^x, so 1 + 2 sum_{j>0} lambda_j = e^x / I_0(x)
  // and for large x e^{-x} I_0(x) ~ 1/sqrt(2 pi x) (1 + 1/(8x) + 9/(128 x^2)).
  const double x = 1e4;
  const auto r = bessel_ratios(2000, x);
  double s = 1.0;
  for (int j = 1; j <= 2000; ++j) s += 2.0 * r[j];
  const double scaled_i0 = (1.0 + 1.0 / (8 * x) + 9.0 / (128 * x * x) + 225.0 / (3072 * x * x * x)) / std::sqrt(kTwoPi * x);
  EXPECT_NEAR(s * scaled_i0, 1.0, 1e-10);
}

TEST(Bessel, RejectsOverflowRegime) {
  EXPECT_THROW(bessel_ratio(1, 2e6), ValidationError);
  EXPECT_THROW(bessel_ratio(1, 0.0), ValidationError);
}

TEST(Spectrum, QuadratureOracle) {
  const double eps = 0.05;
  const double x = 1.0 / (2 * eps * eps);
  EXPECT_NEAR(bessel_ratio(20, x), oracle::lambda_quadrature(20, eps), 1e-8);
  const VonMisesSpectrum s(0.1, 10);
  EXPECT_EQ(s.lambda(0), 1.0);
  for (int j = 1; j <= 10; ++j) {
    EXPECT_LE(s.lambda(j), s.lambda(j - 1));
    EXPECT_GT(s.lambda(j), 0.0);
    EXPECT_NEAR(s.lambda(j), oracle::lambda_quadrature(j, 0.1), 1e-8);
  }
}

TEST(Spectrum, ProductStructure) {
  const VonMisesSpectrum s(0.2, 5);
  EXPECT_EQ(eigenvalue({0, 0}, 2, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(s.eigenvalue({1, 2}, 2), s.lambda(1) * s.lambda(2));
  EXPECT_DOUBLE_EQ(eigenvalue({1, -2}, 2, 0.2), s.lambda(1) * s.lambda(2));
  for (double eps : {0.05, 0.3, 1.0}) EXPECT_LE(eigenvalue({2, 0}, 2, eps), eigenvalue({1, 0}, 2, eps));
}

TEST(Truncation, IndexArithmetic) {
  EXPECT_EQ(truncation_index(0.05, 0.1, 0.5), 47);
  const TruncationSet s = truncation_set(0.05, 0.1, 0.5, 1);
  EXPECT_EQ(s.J, 47);
  EXPECT_EQ(s.modes.size(), 95u);
  EXPECT_EQ(truncation_set(0.05, 0.999999, 0.5, 2).J, 1);
  EXPECT_EQ(truncation_set(0.05, 1.0, 0.5, 2).modes.size(), 1u);
  EXPECT_EQ(truncation_set(0.05, 3.0, 1.0, 1).modes.size(), 1u);
  const TruncationSet s2 = truncation_set(0.5, 0.3, 1.0, 2);
  EXPECT_EQ(s2.modes.size(), static_cast<std::size_t>(2 * s2.J * s2.J + 2 * s2.J + 1));
  for (const auto& j : s2.modes) EXPECT_TRUE(s2.contains({-j[0], -j[1]}));
  EXPECT_TRUE(s2.contains({0, 0}));
}

TEST(Truncation, TailBound) {
  for (double eps : {0.05, 0.1}) {
    for (double h : {0.2, 0.1, 0.05}) {
      for (double qt : {0.5, 1.0}) {
        const int J = truncation_index(eps, h, qt);
        double tail = 0.0;
        for (int j = J + 1;; ++j) {
          const double l = oracle::lambda_quadrature(j, eps);
          tail += 2.0 * l;
          if (l < 1e-17 * tail) break;
        }
        EXPECT_LE(tail, 2.0 / eps * std::pow(h, 2 * qt)) << eps << " " << h << " " << qt;
      }
    }
  }
}

TEST(Kernel, UnitMassAndSymmetry) {
  for (double eps : {0.05, 0.2, 1.0}) {
    using boost::math::quadrature::gauss_kronrod;
    const double m = gauss_kronrod<double, 61>::integrate([&](double x) { return kernel_eval(eps, Vec(x, 0.0), 1); },
                                                          -kPi, kPi, 20, 1e-14);
    EXPECT_NEAR(m, 1.0, 1e-10);
    EXPECT_DOUBLE_EQ(kernel_eval(eps, Vec(0.3, 0.0), 1), kernel_eval(eps, Vec(-0.3, 0.0), 1));
  }
  const double r = kernel_eval(0.05, Vec(kPi, 0.0), 1) / kernel_eval(0.05, Vec(0.0, 0.0), 1);
  EXPECT_EQ(r, std::exp(-2.0 / (0.05 * 0.05)));
  EXPECT_NEAR(kernel_eval(0.3, Vec(0.1, 0.2), 2),
              kernel_eval(0.3, Vec(0.1, 0.0), 1) * kernel_eval(0.3, Vec(0.2, 0.0), 1), 1e-14);
}

TEST(Sobolev, WeightsCancel) {
  // sqrt(alpha_{j,s}) f_{j,s}(x) = sqrt(lambda_j) prod e_{j_l}(x_l) for any s.
  const VonMisesSpectrum spec(0.3, 6);
  for (const MultiIndex j : {MultiIndex{1, 0}, MultiIndex{2, -3}, MultiIndex{0, 5}}) {
    for (double s : {0.0, 1.0, 2.5}) {
      const double n2 = j[0] * j[0] + j[1] * j[1];
      const double alpha = std::pow(1.0 + n2, s) * spec.eigenvalue(j, 2);
      const Vec x(0.7, 2.1);
      const double f = trig_basis(j[0], x[0]) * trig_basis(j[1], x[1]) * std::pow(1.0 + n2, -s / 2);
      EXPECT_NEAR(std::sqrt(alpha) * f, std::sqrt(spec.eigenvalue(j, 2)) * trig_basis(j[0], x[0]) * trig_basis(j[1], x[1]),
                  1e-14);
    }
  }
}

TEST(Increment, DeterministicAndEvaluatorMatchesDirect) {
  const VonMisesSpectrum spec(0.2, 60);
  for (int d : {1, 2}) {
    const TruncationSet set = truncation_set(0.2, 0.3, 0.5, d);
    const NoiseIncrement a = sample_increment(spec, set, 0.01, 7, 3);
    const NoiseIncrement b = sample_increment(spec, set, 0.01, 7, 3);
    const NoiseIncrement c = sample_increment(spec, set, 0.01, 7, 4);
    EXPECT_EQ(a.coeffs[0], b.coeffs[0]);
    EXPECT_NE(a.coeffs[0], c.coeffs[0]);
    std::vector<Vec> pts;
    for (int i = 0; i < 20; ++i) pts.emplace_back(0.31 * i, d == 2 ? 0.17 * (i % 7) : 0.0);
    const NoiseEvaluator ev(spec, set, pts);
    for (int comp = 0; comp < d; ++comp) {
      Eigen::VectorXd out;
      ev.evaluate(a, comp, out);
      for (std::size_t p = 0; p < pts.size(); ++p) EXPECT_NEAR(out[p], a.evaluate(comp, pts[p]), 1e-12);
    }
  }
}

TEST(Increment, MomentsMatchSpectralSum) {
  const double eps = 0.1, dt = 0.01;
  const VonMisesSpectrum spec(eps, 100);
  const TruncationSet set = truncation_set(eps, 0.1, 0.5, 1);
  const std::vector<Vec> pts{Vec(0.3, 0.0), Vec(2.0, 0.0)};
  const NoiseEvaluator ev(spec, set, pts);
  const int n = 10000;
  double m = 0, v = 0;
  for (int s = 0; s < n; ++s) {
    Eigen::VectorXd out;
    ev.evaluate(sample_increment(spec, set, dt, 99, s), 0, out);
    m += out[0];
    v += out[0] * out[0];
  }
  m /= n;
  v = v / n - m * m;
  const double var = dt * truncated_covariance(spec, set, pts[0], pts[0]);
  EXPECT_LE(std::abs(m), 4.0 * std::sqrt(var / n));
  EXPECT_NEAR(v, var, 0.05 * var);
}

TEST(Increment, ComponentsUncorrelated) {
  const VonMisesSpectrum spec(0.2, 40);
  const TruncationSet set = truncation_set(0.2, 0.3, 0.5, 2);
  const std::vector<Vec> pts{Vec(1.0, 2.0)};
  const NoiseEvaluator ev(spec, set, pts);
  const int n = 10000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int s = 0; s < n; ++s) {
    const NoiseIncrement inc = sample_increment(spec, set, 1.0, 5, s);
    Eigen::VectorXd a, b;
    ev.evaluate(inc, 0, a);
    ev.evaluate(inc, 1, b);
    sx += a[0];
    sy += b[0];
    sxx += a[0] * a[0];
    syy += b[0] * b[0];
    sxy += a[0] * b[0];
  }
  const double cov = sxy / n - sx * sy / (n * n);
  const double r = cov / std::sqrt((sxx / n - sx * sx / (n * n)) * (syy / n - sy * sy / (n * n)));
  EXPECT_LE(std::abs(r), 4.0 / std::sqrt(n));
}
