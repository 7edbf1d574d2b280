#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "hatewatch/timeseries.hpp"
#include "oracles.hpp"

using namespace hatewatch;
using namespace hatewatch::timeseries;

namespace {

DailySeries series(std::vector<double> v, std::string label = "s") {
  return {Date::parse("2020-03-11"), std::move(v), std::move(label)};
}

void expect_same(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(b[i])) EXPECT_TRUE(std::isnan(a[i])) << i;
    else EXPECT_NEAR(a[i], b[i], tol) << i;
  }
}

}  // namespace

TEST(Rolling, Examples) {
  expect_same(rolling_mean(series({1, 2, 3, 4}), 2).values, {1, 1.5, 2.5, 3.5}, 1e-15);
  const double nan = std::nan("");
  expect_same(rolling_mean(series({1, 2, 3, 4}), 2, RollingStart::Drop).values, {nan, 1.5, 2.5, 3.5}, 1e-15);
  expect_same(rolling_mean(series({nan, 2, nan, nan, 6}), 2).values, {nan, 2, 2, nan, 6}, 1e-15);
  expect_same(rolling_mean(series({5}), 1).values, {5}, 0);
  EXPECT_THROW(rolling_mean(series({1, 2}), 3), ValidationError);
  EXPECT_THROW(rolling_mean(series({1, 2}), 0), ValidationError);
}

TEST(Rolling, KeepsStartDay) {
  const auto r = rolling_mean(series({1, 2, 3}), 2);
  EXPECT_EQ(r.start, Date::parse("2020-03-11"));
  EXPECT_EQ(r.day(2).to_string(), "2020-03-13");
}

TEST(Rolling, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + rng() % 120);
    for (auto& x : v) x = rng() % 7 == 0 ? std::nan("") : u(rng);
    const int w = 1 + static_cast<int>(rng() % v.size());
    expect_same(rolling_mean(series(v), w).values, oracle::rolling_mean(v, w), 1e-9);
  }
}

TEST(Ranks, AverageTies) {
  const std::vector<double> v{10, 20, 20, 5, 20};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{2, 4, 4, 1, 4}));
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(1 + rng() % 30);
    for (auto& e : x) e = static_cast<double>(rng() % 6);
    EXPECT_EQ(average_ranks(x), oracle::ranks(x));
  }
}

TEST(Spearman, ExactOnMonotoneSeries) {
  std::vector<double> x, up, down;
  for (int i = 0; i < 50; ++i) {
    x.push_back(i);
    up.push_back(std::exp(0.1 * i));
    down.push_back(-i * i * 1.0);
  }
  EXPECT_EQ(spearman(x, up).r_s, 1.0);
  EXPECT_EQ(spearman(x, down).r_s, -1.0);
  EXPECT_EQ(spearman(x, up).n, 50u);
}

TEST(Spearman, TiedFixtureMatchesOracle) {
  const std::vector<double> x{1, 2, 2, 3};
  const std::vector<double> y{2, 1, 3, 4};
  const auto r = spearman(x, y);
  EXPECT_NEAR(r.r_s, oracle::spearman(x, y), 1e-12);
  EXPECT_NEAR(r.r_s, 0.6324555320336759, 1e-12);
  EXPECT_NEAR(r.p_value, oracle::permutation_p_value(x, y), 1e-12);
}

TEST(Spearman, SymmetricAndInvariantUnderMonotoneMaps) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(5 + rng() % 60), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::round(z(rng) * 3);
      y[i] = 0.5 * x[i] + z(rng);
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    const auto a = spearman(x, y);
    EXPECT_NEAR(a.r_s, oracle::spearman(x, y), 1e-12);
    EXPECT_NEAR(spearman(y, x).r_s, a.r_s, 1e-14);
    std::vector<double> fx(x.size());
    std::transform(x.begin(), x.end(), fx.begin(), [](double v) { return std::exp(v) + 3.0; });
    EXPECT_NEAR(spearman(fx, y).r_s, a.r_s, 1e-12);
    EXPECT_GE(a.p_value, 0.0);
    EXPECT_LE(a.p_value, 1.0);
  }
}

TEST(Spearman, SkipsNanPairs) {
  const double nan = std::nan("");
  const std::vector<double> x{1, nan, 2, 3, 4};
  const std::vector<double> y{1, 9, 2, nan, 3};
  const auto r = spearman(x, y);
  EXPECT_EQ(r.n, 3u);
  EXPECT_EQ(r.r_s, 1.0);
}

TEST(Spearman, UndefinedCases) {
  const std::vector<double> c{2, 2, 2, 2};
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_THROW(spearman(c, v), std::domain_error);
  EXPECT_THROW(spearman(v, c), std::domain_error);
  EXPECT_THROW(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ValidationError);
  EXPECT_THROW(spearman(v, std::vector<double>{1, 2, 3}), ValidationError);
  DailySeries a = series({1, 2, 3, 4});
  DailySeries b = series({1, 2, 3, 4});
  b.start = b.start + 1;
  EXPECT_THROW(spearman(a, b), ValidationError);
}

TEST(PValue, ExactMatchesOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + rng() % 4;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng() % 5);
      y[i] = static_cast<double>(rng() % 5);
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
        std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
      continue;
    }
    EXPECT_NEAR(permutation_p_value(x, y), oracle::permutation_p_value(x, y), 1e-12);
  }
}

TEST(PValue, TApproximation) {
  EXPECT_NEAR(t_approximation_p_value(0.0, 30), 1.0, 1e-12);
  EXPECT_EQ(t_approximation_p_value(1.0, 30), 0.0);
  EXPECT_EQ(t_approximation_p_value(-1.0, 30), 0.0);
  // r = 0.5, n = 12: t = 0.5 sqrt(10 / 0.75) = 1.8257, two-sided p with 10 df.
  EXPECT_NEAR(t_approximation_p_value(0.5, 12), 0.0979, 1e-4);
  EXPECT_EQ(t_approximation_p_value(0.3, 50), t_approximation_p_value(-0.3, 50));
}

// Large samples use the t approximation.
TEST(PValue, LargeSampleUsesTApproximation) {
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(i);
    y.push_back((i * 7) % 13);
  }
  const auto r = spearman(x, y);
  EXPECT_NEAR(r.p_value, t_approximation_p_value(r.r_s, 40), 1e-15);
}

TEST(GroupSeries, DailyMetrics) {
  const Date d0 = Date::parse("2020-06-01");
  GroupSet black;
  black.insert(Group::Black);
  GroupSet asian;
  asian.insert(Group::Asian);
  const std::vector<TweetObservation> obs{
      {d0, 0.2, false, black},
      {d0, -0.2, false, black},
      {d0, 0.6, true, black},
      {d0, 0.9, true, asian},
      {d0 + 2, -0.8, true, black},
  };
  const std::vector<ingest::CrimeRecord> crimes{
      {"c1", d0 + 1, ingest::Bias::AntiBlack, "", ""},
      {"c2", d0 + 1, ingest::Bias::AntiBlack, "", ""},
      {"c3", d0 + 1, ingest::Bias::AntiAsian, "", ""},
      {"c4", d0 + 5, ingest::Bias::AntiBlack, "", ""},
  };
  const DateRange range{d0, d0 + 2};
  const auto count = group_series(obs, crimes, Group::Black, Metric::TweetCount, range);
  EXPECT_EQ(count.values, (std::vector<double>{3, 0, 1}));
  const auto mean = group_series(obs, crimes, Group::Black, Metric::MeanSentiment, range);
  EXPECT_NEAR(mean.values[0], 0.2, 1e-15);
  EXPECT_TRUE(std::isnan(mean.values[1]));
  EXPECT_EQ(mean.values[2], -0.8);
  const auto strong = group_series(obs, crimes, Group::Black, Metric::StrongProportion, range);
  EXPECT_NEAR(strong.values[0], 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(std::isnan(strong.values[1]));
  const auto cc = group_series(obs, crimes, Group::Black, Metric::CrimeCount, range);
  EXPECT_EQ(cc.values, (std::vector<double>{0, 2, 0}));
  EXPECT_EQ(cc.start, d0);
}

TEST(Metrics, NamesRoundTrip) {
  for (Metric m : {Metric::TweetCount, Metric::MeanSentiment, Metric::StrongProportion, Metric::CrimeCount}) {
    EXPECT_EQ(parse_metric(to_string(m)), m);
  }
  EXPECT_THROW(parse_metric("vibes"), ValidationError);
}

TEST(Writers, SeriesAndCorrelations) {
  std::ostringstream out;
  write_series(out, {series({1, std::nan("")}, "a")});
  EXPECT_EQ(out.str(), "date,series_label,value\n2020-03-11,a,1\n2020-03-12,a,nan\n");
  std::ostringstream corr;
  write_correlations(corr, {{"x", "y", {0.5, 0.25, 10}}});
  EXPECT_EQ(corr.str(), "x_label,y_label,r_s,p_value,n\nx,y,0.5,0.25,10\n");
}
