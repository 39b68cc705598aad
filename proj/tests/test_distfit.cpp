#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "probagen/distfit.hpp"
#include "probagen/errors.hpp"
#include "oracles.hpp"

using namespace probagen;
using namespace probagen::testing;

namespace {

std::vector<double> draws(std::size_t n, std::uint64_t seed, auto dist) {
  std::mt19937_64 g(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(g);
  return out;
}

}  // namespace

TEST(FitBest, ConstantSample) {
  auto d = fit_best(std::vector<double>(20, 7.0));
  EXPECT_EQ(d.family, Family::Constant);
  EXPECT_DOUBLE_EQ(d.params[0], 7.0);
  EXPECT_DOUBLE_EQ(d.fit_distance, 0.0);

  auto z = fit_best(std::vector<double>(5, 0.0));
  EXPECT_EQ(z.family, Family::Constant);
  EXPECT_DOUBLE_EQ(z.params[0], 0.0);
}

TEST(FitBest, RejectsEmptyAndNegative) {
  EXPECT_THROW(fit_best(std::vector<double>{}), InputError);
  EXPECT_THROW(fit_best(std::vector<double>{1.0, -2.0}), InputError);
}

TEST(FitBest, RecoversExponentialMean) {
  const auto xs = draws(10000, 11, std::exponential_distribution<double>(1.0 / 5.0));
  const auto d = fit_best(xs);
  EXPECT_EQ(d.family, Family::Exponential);
  EXPECT_NEAR(d.mean(), 5.0, 0.25);
}

TEST(FitBest, SelectsGeneratingFamilyOrAnEquallyGoodOne) {
  struct Case {
    Family family;
    std::vector<double> xs;
  };
  std::vector<Case> cases{
      {Family::Exponential, draws(5000, 1, std::exponential_distribution<double>(0.5))},
      {Family::Uniform, draws(5000, 2, std::uniform_real_distribution<double>(3.0, 9.0))},
      {Family::Lognormal, draws(5000, 3, std::lognormal_distribution<double>(1.0, 0.6))},
  };
  for (const auto& c : cases) {
    const auto best = fit_best(c.xs);
    const auto own = fit_family(c.family, c.xs);
    ASSERT_TRUE(own);
    EXPECT_TRUE(best.family == c.family || best.fit_distance >= 0.9 * own->fit_distance)
        << to_string(c.family) << " lost to " << to_string(best.family);
  }
}

TEST(Sample, ConstantAlwaysReturnsValue) {
  Rng rng(3);
  const auto d = FittedDistribution::constant(7.0);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sample(d, rng), 7.0);
}

TEST(Sample, NegativeQuantilesClampToZero) {
  FittedDistribution d{Family::Normal, {0.0, 1.0}, 0.0};
  EXPECT_EQ(d.quantile(0.382), 0.0);  // Φ^-1(0.382) ≈ -0.3
  Rng rng(5);
  std::size_t zeros = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = sample(d, rng);
    EXPECT_GE(x, 0.0);
    zeros += x == 0.0;
  }
  EXPECT_GT(zeros, 400u);
}

TEST(Sample, GammaSampleMeanMatchesAnalyticMean) {
  const auto xs = draws(20000, 4, std::gamma_distribution<double>(2.5, 3.0));
  const auto d = *fit_family(Family::Gamma, xs);
  Rng rng(9);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample(d, rng);
  EXPECT_NEAR(sum / n, d.mean(), 0.02 * d.mean());
}

TEST(Sample, ReproducibleUnderSeed) {
  FittedDistribution d{Family::Lognormal, {0.5, 0.8}, 0.0};
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample(d, a), sample(d, b));
}

TEST(Wasserstein, PointMassesAndIdentity) {
  EXPECT_DOUBLE_EQ(wasserstein_1d(std::vector<double>{0}, std::vector<double>{5}), 5.0);
  const std::vector<double> a{1, 4, 4, 9};
  EXPECT_DOUBLE_EQ(wasserstein_1d(a, a), 0.0);
  EXPECT_THROW(wasserstein_1d(std::vector<double>{}, a), InputError);
}

TEST(Wasserstein, TwoPointInstanceMatchesOracle) {
  const std::vector<double> a{0, 10};
  const std::vector<double> b{5, 5};
  EXPECT_DOUBLE_EQ(transport_oracle(a, b), 5.0);
  EXPECT_DOUBLE_EQ(wasserstein_1d(a, b), 5.0);
}

TEST(Wasserstein, MatchesTransportEnumeration) {
  std::mt19937 g(17);
  std::uniform_int_distribution<int> value(0, 20);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 150; ++trial) {
    const std::size_t na = 1 + g() % 4;
    const std::size_t nb = 1 + g() % 4;
    if (std::lcm(na, nb) > 8) continue;
    std::vector<double> a(na);
    std::vector<double> b(nb);
    for (auto& x : a) x = value(g) * 0.5;
    for (auto& x : b) x = value(g) * 0.5;
    EXPECT_NEAR(wasserstein_1d(a, b), transport_oracle(a, b), 1e-9);
    ++checked;
  }
  EXPECT_GE(checked, 100);
}

TEST(Wasserstein, MetricAxioms) {
  std::mt19937 g(23);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  auto rnd = [&] {
    std::vector<double> v(1 + g() % 6);
    for (auto& x : v) x = u(g);
    return v;
  };
  for (int i = 0; i < 200; ++i) {
    const auto a = rnd();
    const auto b = rnd();
    const auto c = rnd();
    EXPECT_NEAR(wasserstein_1d(a, b), wasserstein_1d(b, a), 1e-12);
    EXPECT_LE(wasserstein_1d(a, c), wasserstein_1d(a, b) + wasserstein_1d(b, c) + 1e-12);
    auto doubled = a;
    doubled.insert(doubled.end(), a.begin(), a.end());
    EXPECT_NEAR(wasserstein_1d(a, doubled), 0.0, 1e-12);
    if (a != b) {
      auto sa = a;
      auto sb = b;
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      if (sa != sb && sa.size() == sb.size()) EXPECT_GT(wasserstein_1d(a, b), 0.0);
    }
  }
}

TEST(Distribution, JsonRoundTripAndValidation) {
  FittedDistribution d{Family::Triangular, {1.0, 2.0, 5.0}, 0.25};
  EXPECT_EQ(distribution_from_json(to_json(d)), d);
  EXPECT_THROW(distribution_from_json({{"family", "gamma"}, {"params", {-1.0, 2.0}}, {"fit_distance", 0.0}}),
               InputError);
  EXPECT_THROW(distribution_from_json({{"family", "weibull"}, {"params", {1.0}}, {"fit_distance", 0.0}}),
               ParseError);
}
