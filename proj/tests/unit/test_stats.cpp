#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wigchar/error.hpp"
#include "wigchar/rng.hpp"
#include "wigchar/stats.hpp"

using namespace wigchar;

TEST(Fit, ExactPowerLaw) {
  std::vector<double> x, y;
  for (double n : {100.0, 200.0, 400.0, 800.0, 1600.0}) {
    x.push_back(n);
    y.push_back(3.0 * std::pow(n, -0.5));
  }
  const ScalingFit f = fit_scaling(x, y);
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.stderr_slope, 0.0, 1e-12);
  EXPECT_EQ(f.points, 5u);
}

TEST(Fit, ConstantGivesZeroSlope) {
  const std::vector<double> x = {10, 20, 40, 80}, y = {2, 2, 2, 2};
  EXPECT_NEAR(fit_scaling(x, y).slope, 0.0, 1e-12);
}

TEST(Fit, NoisyPowerLawWithinFivePercent) {
  RandomStream s(StreamId{31, 0, StreamPurpose::Auxiliary, 0});
  std::vector<double> x, y;
  for (int k = 0; k < 40; ++k) {
    const double n = 100.0 * std::pow(2.0, k / 8.0);
    x.push_back(n);
    y.push_back(std::pow(n, -0.5) * (1.0 + 0.05 * s.normal()));
  }
  const ScalingFit f = fit_scaling(x, y);
  EXPECT_NEAR(f.slope, -0.5, 0.05);
  EXPECT_GT(f.stderr_slope, 0.0);
  EXPECT_LT(std::abs(f.slope + 0.5), 4.0 * f.stderr_slope + 1e-3);
}

TEST(Fit, RejectsBadInput) {
  const std::vector<double> two = {1, 2};
  EXPECT_THROW(fit_scaling(two, two), Error);
  const std::vector<double> x = {1, 2, 3}, y = {1, -1, 1};
  EXPECT_THROW(fit_scaling(x, y), Error);
  const std::vector<double> same = {5, 5, 5};
  try {
    fit_scaling(same, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateFit);
  }
}

TEST(Domination, ExponentOfQuantile) {
  const std::vector<double> ones(100, 1.0);
  EXPECT_NEAR(domination_quantile(ones, 0.95, 1000.0), 0.0, 1e-15);
  std::vector<double> r(100, std::pow(1000.0, 0.1));
  EXPECT_NEAR(domination_quantile(r, 0.95, 1000.0), 0.1, 1e-12);
  EXPECT_THROW(domination_quantile(std::vector<double>{}, 0.95, 1000.0), Error);
  EXPECT_THROW(domination_quantile(std::vector<double>{0.0, 1.0}, 0.95, 1000.0), Error);
  EXPECT_THROW(domination_quantile(ones, 0.95, 1.0), Error);
}

TEST(Quantiles, Type7) {
  const std::vector<double> v = {4, 1, 3, 2, 5};
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.1), 1.4);
  EXPECT_DOUBLE_EQ(median(v), 3.0);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{1, 2, 3, 10}), 2.5);
  EXPECT_DOUBLE_EQ(mean(v), 3.0);
  EXPECT_DOUBLE_EQ(stddev(v), std::sqrt(2.5));
  EXPECT_THROW(median(std::vector<double>{}), Error);
}

TEST(Ks, KolmogorovSurvivalKnownValues) {
  EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_NEAR(kolmogorov_survival(0.0), 1.0, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(10.0), 0.0, 1e-12);
}

TEST(Ks, OneSampleStatisticByHand) {
  // Sample {0.1, 0.5, 0.6} against U(0,1): D = max(1/3 - 0.1, 2/3 - 0.5, 1 - 0.6, 0.5 - 1/3, 0.6 - 2/3) = 0.4.
  const KsResult r = ks_one_sample({0.6, 0.1, 0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_NEAR(r.statistic, 0.4, 1e-15);
  EXPECT_EQ(r.n, 3u);
}

TEST(Ks, TwoSampleStatisticByHand) {
  const KsResult r = ks_two_sample({1, 2, 3, 4}, {3.5, 5, 6});
  // After 1,2,3: F_a = 3/4, F_b = 0.
  EXPECT_NEAR(r.statistic, 0.75, 1e-15);
  EXPECT_EQ(r.n, 4u);
  EXPECT_EQ(r.m, 3u);
  EXPECT_THROW(ks_two_sample({}, {1.0}), Error);
}

TEST(Ks, TwoSampleNullIsCalibrated) {
  int rejections = 0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    RandomStream s(StreamId{32, rep, StreamPurpose::Auxiliary, 0});
    std::vector<double> a(500), b(700);
    for (double& x : a) x = s.normal();
    for (double& x : b) x = s.normal();
    rejections += ks_two_sample(a, b).p_value < 0.05 ? 1 : 0;
  }
  // Binomial(200, 0.05): mean 10, sd 3.1.
  EXPECT_LE(rejections, 22);
  EXPECT_GE(rejections, 2);
}

TEST(Ks, TwoSampleDetectsShift) {
  RandomStream s(StreamId{33, 0, StreamPurpose::Auxiliary, 0});
  std::vector<double> a(2000), b(2000);
  for (double& x : a) x = s.normal();
  for (double& x : b) x = s.normal() + 0.2;
  EXPECT_LT(ks_two_sample(a, b).p_value, 1e-4);
}

TEST(Bootstrap, MeanStandardError) {
  RandomStream data(StreamId{34, 0, StreamPurpose::Auxiliary, 0});
  std::vector<double> v(400);
  for (double& x : v) x = data.normal();
  RandomStream s(StreamId{34, 1, StreamPurpose::Bootstrap, 0});
  const BootstrapResult b = bootstrap(
      v, [](std::vector<double>& xs) { return mean(xs); }, 1000, s);
  EXPECT_DOUBLE_EQ(b.estimate, mean(v));
  EXPECT_NEAR(b.standard_error, stddev(v) / std::sqrt(400.0), 0.15 * stddev(v) / std::sqrt(400.0));
  EXPECT_LT(b.lower, b.estimate);
  EXPECT_GT(b.upper, b.estimate);
}
