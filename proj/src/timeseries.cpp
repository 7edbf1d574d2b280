#include "hatewatch/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "hatewatch/csv.hpp"

namespace hatewatch::timeseries {

namespace {

constexpr double kTieTolerance = 1e-12;

struct Centered {
  std::vector<double> values;
  double sum_squares = 0.0;
};

Centered center(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  Centered c;
  c.values.reserve(v.size());
  for (double x : v) {
    c.values.push_back(x - mean);
    c.sum_squares += (x - mean) * (x - mean);
  }
  return c;
}

double rank_correlation(const Centered& x, const Centered& y) {
  double num = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) num += x.values[i] * y.values[i];
  return std::clamp(num / std::sqrt(x.sum_squares * y.sum_squares), -1.0, 1.0);
}

}  // namespace

DailySeries rolling_mean(const DailySeries& s, int window, RollingStart start) {
  if (window < 1) throw ValidationError(fmt::format("rolling window {} must be >= 1", window));
  if (static_cast<std::size_t>(window) > s.values.size()) {
    throw ValidationError(fmt::format("rolling window {} exceeds series length {}", window,
                                      s.values.size()));
  }
  DailySeries out{s.start, std::vector<double>(s.values.size()), s.label};
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (start == RollingStart::Drop && i + 1 < w) {
      out.values[i] = std::nan("");
      continue;
    }
    const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t j = lo; j <= i; ++j) {
      if (std::isnan(s.values[j])) continue;
      sum += s.values[j];
      ++n;
    }
    out.values[i] = n ? sum / static_cast<double>(n) : std::nan("");
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double t_approximation_p_value(double r, std::size_t n) {
  if (n < 3) throw ValidationError("t approximation needs n >= 3");
  const double one_minus = (1.0 - r) * (1.0 + r);
  if (one_minus <= 0.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(dof / one_minus);
  const boost::math::students_t_distribution<double> dist(dof);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, t)), 0.0, 1.0);
}

double permutation_p_value(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw ValidationError("permutation test needs equal lengths");
  if (n > 12) throw ValidationError(fmt::format("exact permutation test too large (n = {})", n));
  const Centered rx = center(average_ranks(x));
  const Centered ry = center(average_ranks(y));
  if (rx.sum_squares == 0.0 || ry.sum_squares == 0.0) {
    throw std::domain_error("rank correlation undefined for a constant series");
  }
  const double observed = std::abs(rank_correlation(rx, ry));

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Centered permuted = ry;
  std::size_t extreme = 0;
  std::size_t total = 0;
  do {
    for (std::size_t i = 0; i < n; ++i) permuted.values[i] = ry.values[perm[i]];
    if (std::abs(rank_correlation(rx, permuted)) >= observed - kTieTolerance) ++extreme;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError(fmt::format("series lengths differ ({} vs {})", x.size(), y.size()));
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  const std::size_t n = xs.size();
  if (n < 3) throw ValidationError(fmt::format("spearman needs >= 3 paired values, got {}", n));

  const Centered rx = center(average_ranks(xs));
  const Centered ry = center(average_ranks(ys));
  if (rx.sum_squares == 0.0 || ry.sum_squares == 0.0) {
    throw std::domain_error("rank correlation undefined for a constant series");
  }
  CorrelationResult res;
  res.n = n;
  res.r_s = rank_correlation(rx, ry);
  res.p_value = n <= kExactPermutationMaxN ? permutation_p_value(xs, ys)
                                           : t_approximation_p_value(res.r_s, n);
  return res;
}

CorrelationResult spearman(const DailySeries& x, const DailySeries& y) {
  if (x.start != y.start) {
    throw ValidationError(fmt::format("series '{}' and '{}' start on different days", x.label,
                                      y.label));
  }
  return spearman(std::span<const double>(x.values), std::span<const double>(y.values));
}

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::TweetCount: return "tweet_count";
    case Metric::MeanSentiment: return "mean_sentiment";
    case Metric::StrongProportion: return "strong_proportion";
    case Metric::CrimeCount: return "crime_count";
  }
  return "";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : {Metric::TweetCount, Metric::MeanSentiment, Metric::StrongProportion,
                   Metric::CrimeCount}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError(fmt::format("unknown metric '{}'", name));
}

DailySeries group_series(std::span<const TweetObservation> tweets,
                         std::span<const ingest::CrimeRecord> crimes, Group group, Metric metric,
                         DateRange range) {
  if (range.last < range.first) throw ValidationError("series range ends before it starts");
  const auto len = static_cast<std::size_t>(range.length());
  DailySeries out{range.first, std::vector<double>(len, 0.0),
                  fmt::format("{}:{}", to_string(group), to_string(metric))};

  if (metric == Metric::CrimeCount) {
    for (const auto& c : crimes) {
      if (range.contains(c.date) && ingest::target_group(c.bias) == group) {
        out.values[static_cast<std::size_t>(c.date - range.first)] += 1.0;
      }
    }
    return out;
  }

  std::vector<double> count(len, 0.0);
  std::vector<double> sum(len, 0.0);
  std::vector<double> strong(len, 0.0);
  for (const auto& t : tweets) {
    if (!range.contains(t.date) || !t.groups.contains(group)) continue;
    const auto i = static_cast<std::size_t>(t.date - range.first);
    count[i] += 1.0;
    sum[i] += t.sentiment;
    if (t.strong) strong[i] += 1.0;
  }
  for (std::size_t i = 0; i < len; ++i) {
    switch (metric) {
      case Metric::TweetCount:
        out.values[i] = count[i];
        break;
      case Metric::MeanSentiment:
        out.values[i] = count[i] > 0 ? sum[i] / count[i] : std::nan("");
        break;
      case Metric::StrongProportion:
        out.values[i] = count[i] > 0 ? strong[i] / count[i] : std::nan("");
        break;
      case Metric::CrimeCount:
        break;
    }
  }
  return out;
}

void write_series(std::ostream& out, const std::vector<DailySeries>& series) {
  csv::write_row(out, {"date", "series_label", "value"});
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      csv::write_row(out, {s.day(i).to_string(), s.label, format_double(s.values[i])});
    }
  }
}

void write_correlations(std::ostream& out, const std::vector<CorrelationRow>& rows) {
  csv::write_row(out, {"x_label", "y_label", "r_s", "p_value", "n"});
  for (const auto& r : rows) {
    csv::write_row(out, {r.x_label, r.y_label, format_double(r.result.r_s),
                         format_double(r.result.p_value), std::to_string(r.result.n)});
  }
}

}  // namespace hatewatch::timeseries
