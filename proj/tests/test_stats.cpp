#include <gtest/gtest.h>

#include <cmath>

#include "mignet/rng.hpp"
#include "mignet/stats.hpp"
#include "oracles/ks.hpp"

using namespace mignet;

TEST(Ks, IdenticalSamples) {
  std::vector<double> a = {1, 2, 3, 4, 5};
  auto r = ks_two_sample(a, a);
  EXPECT_EQ(r.d_statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Ks, DisjointSupports) {
  std::vector<double> a = {1, 2}, b = {10, 20};
  EXPECT_EQ(ks_two_sample(a, b).d_statistic, 1.0);
}

TEST(Ks, OverlappingStepFunctions) {
  std::vector<double> a = {1, 2, 3, 4}, b = {3, 4, 5, 6};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b).d_statistic, 0.5);
  EXPECT_DOUBLE_EQ(oracle::ks_statistic(a, b), 0.5);
}

TEST(Ks, EmptyOrNanRejected) {
  std::vector<double> a = {1}, e;
  EXPECT_THROW(ks_two_sample(a, e), ValidationError);
  EXPECT_THROW(ks_two_sample(e, a), ValidationError);
  std::vector<double> nan = {std::nan("")};
  EXPECT_THROW(ks_two_sample(a, nan), ValidationError);
}

TEST(Ks, MatchesBruteForceWithTies) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(1 + rng.below(40)), b(1 + rng.below(40));
    for (auto& v : a) v = static_cast<double>(rng.below(8));
    for (auto& v : b) v = static_cast<double>(rng.below(10));
    EXPECT_NEAR(ks_two_sample(a, b).d_statistic, oracle::ks_statistic(a, b), 1e-12);
  }
}

TEST(Ks, SymmetricAndTransformInvariant) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(30), b(45);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal() + 0.3;
    auto ab = ks_two_sample(a, b), ba = ks_two_sample(b, a);
    EXPECT_EQ(ab.d_statistic, ba.d_statistic);
    EXPECT_EQ(ab.p_value, ba.p_value);
    std::vector<double> ta = a, tb = b;
    for (auto& v : ta) v = std::exp(3.0 * v) + 7.0;
    for (auto& v : tb) v = std::exp(3.0 * v) + 7.0;
    EXPECT_DOUBLE_EQ(ks_two_sample(ta, tb).d_statistic, ab.d_statistic);
  }
}

TEST(Ks, CriticalValueGivesFivePercent) {
  // n1 = n2 = 100: build samples whose D equals the 5% critical value as closely as the grid allows,
  // and check the series at that exact D.
  const double n = 100.0;
  const double d_crit = 1.36 * std::sqrt(2.0 * n / (n * n));
  const double ne = n * n / (2 * n);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d_crit;
  EXPECT_NEAR(kolmogorov_q(lambda), 0.05, 0.01);

  // D = 0.19 is the nearest attainable value on the 1/100 grid.
  std::vector<double> a(100), b(100);
  for (int i = 0; i < 100; ++i) {
    a[i] = i;
    b[i] = i + 19;
  }
  auto r = ks_two_sample(a, b);
  EXPECT_NEAR(r.d_statistic, 0.19, 1e-12);
  EXPECT_NEAR(r.p_value, 0.05, 0.01);
}

TEST(Ks, PValueMonotoneInD) {
  double prev = 2.0;
  for (double l = 0.0; l < 3.0; l += 0.01) {
    double q = kolmogorov_q(l);
    EXPECT_LE(q, prev);
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, 1.0);
    prev = q;
  }
}

TEST(Ks, SeriesMatchesLongDoubleReference) {
  for (double l = 0.5; l <= 2.5; l += 0.02) {
    long double ref = 0.0L;
    for (int k = 1; k <= 200; ++k)
      ref += (k % 2 == 1 ? 2.0L : -2.0L) * std::exp(-2.0L * k * k * static_cast<long double>(l) * l);
    EXPECT_NEAR(kolmogorov_q(l), static_cast<double>(ref), 1e-9) << "lambda=" << l;
  }
}

TEST(Summary, Basic) {
  std::vector<double> v = {1, 2, 3};
  auto s = summarize(v);
  EXPECT_EQ(s.count, 3u);
  EXPECT_DOUBLE_EQ(*s.mean, 2.0);
  EXPECT_EQ(*s.min, 1.0);
  EXPECT_EQ(*s.max, 3.0);
  std::vector<double> one = {4.5};
  s = summarize(one);
  EXPECT_EQ(*s.mean, 4.5);
  EXPECT_EQ(*s.min, 4.5);
  EXPECT_EQ(*s.max, 4.5);
  s = summarize({});
  EXPECT_EQ(s.count, 0u);
  EXPECT_FALSE(s.mean || s.min || s.max);
}

TEST(Summary, Grouped) {
  std::vector<std::pair<std::string, std::vector<double>>> groups = {{"migrant", {1, 3}}, {"native", {}}};
  auto g = group_summary(groups);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(*g[0].second.mean, 2.0);
  EXPECT_EQ(g[1].second.count, 0u);
}

TEST(Histogram, LogBinsOnePerDecade) {
  std::vector<double> v = {1, 10, 100};
  auto h = histogram(v, 3, true);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_NEAR(h.edges[1], std::pow(10.0, 2.0 / 3.0), 1e-12);
  EXPECT_EQ(h.edges.back(), 100.0);
}

TEST(Histogram, AllEqualSingleBin) {
  std::vector<double> v(9, 3.25);
  auto h = histogram(v, 5);
  std::size_t occupied = 0;
  for (auto c : h.counts) occupied += c > 0;
  EXPECT_EQ(occupied, 1u);
  EXPECT_EQ(h.total(), 9u);
}

TEST(Histogram, CountsConserved) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> v(rng.below(500));
    for (auto& x : v) x = std::exp(rng.normal() * 3.0);
    std::size_t bins = 1 + rng.below(30);
    EXPECT_EQ(histogram(v, bins).total(), v.size());
    EXPECT_EQ(histogram(v, bins, true).total(), v.size());
    EXPECT_EQ(histogram(v, bins, false, std::make_pair(0.0, 1.0)).total(), v.size());
  }
}

TEST(Histogram, LogRejectsNonPositiveListingOffenders) {
  std::vector<double> v = {1, 0, -2.5, 3};
  try {
    histogram(v, 3, true);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find(" 0"), std::string::npos);
    EXPECT_NE(msg.find("-2.5"), std::string::npos);
  }
  EXPECT_THROW(histogram(v, 0), ValidationError);
}

TEST(Pearson, KnownValues) {
  std::vector<double> x = {1, 2, 3, 4}, y = {2, 4, 6, 8}, z = {4, 3, 2, 1}, c = {1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(*pearson(x, y), 1.0);
  EXPECT_DOUBLE_EQ(*pearson(x, z), -1.0);
  EXPECT_FALSE(pearson(x, c));
}
