#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hatewatch/common.hpp"
#include "hatewatch/ingest.hpp"

namespace hatewatch::timeseries {

// One value per day from `start`, no gaps. Mean-type series hold NaN on days
// without observations; count series hold 0.
struct DailySeries {
  Date start;
  std::vector<double> values;
  std::string label;

  Date day(std::size_t i) const noexcept { return start + static_cast<std::int32_t>(i); }
};

enum class RollingStart {
  // Window grows from 1 to `window` over the first days.
  Expanding,
  // First window-1 days are NaN.
  Drop,
};

// value[i] = mean of the non-NaN inputs in [i-window+1, i]; NaN if there are none.
// Throws ValidationError when window < 1 or window > length.
DailySeries rolling_mean(const DailySeries& s, int window,
                         RollingStart start = RollingStart::Expanding);

struct CorrelationResult {
  double r_s = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// Above this sample size p-values come from the t approximation.
inline constexpr std::size_t kExactPermutationMaxN = 10;

// 1-based ranks; ties receive the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> v);

// Two-sided p-value of r under H0 from t = r*sqrt((n-2)/(1-r^2)) with n-2 degrees of freedom.
double t_approximation_p_value(double r, std::size_t n);

// Two-sided p-value by enumerating all n! orderings of y against x:
// the fraction with |r_s| >= |observed r_s|. Throws ValidationError for n > 12.
double permutation_p_value(std::span<const double> x, std::span<const double> y);

// Spearman's rank correlation over index pairs where neither value is NaN.
// Throws ValidationError on a length mismatch or fewer than 3 pairs, and
// std::domain_error when either side is constant.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);
// Series must also share their start day.
CorrelationResult spearman(const DailySeries& x, const DailySeries& y);

enum class Metric { TweetCount, MeanSentiment, StrongProportion, CrimeCount };

std::string_view to_string(Metric m) noexcept;
// Throws ValidationError for an unknown name.
Metric parse_metric(std::string_view name);

// What the series builder needs to know about one scored tweet.
struct TweetObservation {
  Date date;
  double sentiment = 0.0;
  bool strong = false;
  GroupSet groups;
};

// Daily series over `range` for one group. Tweet metrics use tweets whose
// group set contains `group`; crime_count uses crimes whose bias targets it.
DailySeries group_series(std::span<const TweetObservation> tweets,
                         std::span<const ingest::CrimeRecord> crimes, Group group, Metric metric,
                         DateRange range);

// `date,series_label,value`, series after series.
void write_series(std::ostream& out, const std::vector<DailySeries>& series);

struct CorrelationRow {
  std::string x_label;
  std::string y_label;
  CorrelationResult result;
};

// `x_label,y_label,r_s,p_value,n`.
void write_correlations(std::ostream& out, const std::vector<CorrelationRow>& rows);

}  // namespace hatewatch::timeseries
