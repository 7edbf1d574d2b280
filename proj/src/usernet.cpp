#include "hatewatch/usernet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "hatewatch/csv.hpp"

namespace hatewatch::usernet {

namespace {

struct Activity {
  std::size_t tweets = 0;
  std::int64_t followers = 0;
  double sentiment_sum = 0.0;
  std::size_t scored_group_tweets = 0;
  // Sum over the user's tweets of each L topic's probability.
  std::vector<double> topic_mass;
};

// Bin edges like 0.7000000000000001 print as 0.7.
double tidy(double edge) { return std::round(edge * 1e12) / 1e12; }

}  // namespace

UserNetwork build_network(std::span<const ingest::TweetRecord> tweets,
                          const std::vector<topics::TopicAssignment>& assignments,
                          std::span<const topics::TopicId> group_topics, Group group,
                          const NetworkOptions& options) {
  if (group_topics.empty()) throw ValidationError("user network needs a non-empty topic set");
  if (options.min_tweets < 1) throw ValidationError("min_tweets must be >= 1");
  if (!(options.prune_epsilon >= 0.0)) throw ValidationError("prune epsilon must be >= 0");

  std::vector<topics::TopicId> L(group_topics.begin(), group_topics.end());
  std::sort(L.begin(), L.end());
  L.erase(std::unique(L.begin(), L.end()), L.end());

  std::unordered_map<std::string_view, const topics::TopicAssignment*> by_tweet;
  for (const auto& a : assignments) by_tweet.emplace(a.tweet_id, &a);

  std::map<std::string, Activity> activity;
  for (const auto& t : tweets) {
    auto& act = activity[t.user_id];
    if (act.topic_mass.empty()) act.topic_mass.assign(L.size(), 0.0);
    ++act.tweets;
    act.followers = std::max(act.followers, t.follower_count);

    const auto it = by_tweet.find(t.tweet_id);
    if (it == by_tweet.end()) continue;
    const auto& a = *it->second;
    const auto member = topics::thresholded_topics(a, options.threshold);
    bool in_group = false;
    for (std::size_t k = 0; k < L.size(); ++k) {
      const double p = a.probability(L[k]);
      if (options.threshold_weights && p < options.threshold.theta) continue;
      act.topic_mass[k] += p;
      in_group = in_group || std::binary_search(member.begin(), member.end(), L[k]);
    }
    if (in_group && t.sentiment) {
      act.sentiment_sum += *t.sentiment;
      ++act.scored_group_tweets;
    }
  }

  UserNetwork net;
  net.group = group;
  std::vector<const Activity*> kept;
  for (const auto& [user, act] : activity) {
    if (act.tweets < options.min_tweets) continue;
    if (std::none_of(act.topic_mass.begin(), act.topic_mass.end(),
                     [](double m) { return m > 0.0; })) {
      continue;
    }
    net.users.push_back(user);
    net.profiles.push_back({act.followers, act.tweets,
                            act.scored_group_tweets
                                ? act.sentiment_sum / static_cast<double>(act.scored_group_tweets)
                                : std::nan("")});
    kept.push_back(&act);
  }
  const std::size_t n = net.users.size();
  if (n < 2) {
    throw ValidationError(fmt::format("user network for {} has {} qualifying users; need >= 2",
                                      to_string(group), n));
  }

  // Summing each user's probabilities first turns the double sum over tweet
  // pairs into a dot product over L.
  net.weights.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double w = 0.0;
      for (std::size_t k = 0; k < L.size(); ++k) w += kept[a]->topic_mass[k] * kept[b]->topic_mass[k];
      if (w < options.prune_epsilon) w = 0.0;
      net.weights[a * n + b] = w;
      net.weights[b * n + a] = w;
    }
  }
  return net;
}

std::vector<double> eigenvector_centrality(const UserNetwork& net, double tol, int max_iter) {
  const std::size_t n = net.size();
  if (net.weights.size() != n * n) throw ValidationError("weight matrix has the wrong shape");
  if (std::none_of(net.weights.begin(), net.weights.end(), [](double w) { return w > 0.0; })) {
    throw ValidationError("eigenvector centrality needs at least one positive weight");
  }
  if (!(tol > 0.0) || max_iter < 1) throw ValidationError("bad centrality iteration limits");

  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> next(n);
  double residual = 0.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = &net.weights[i * n];
      double acc = x[i];
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
      next[i] = acc;
    }
    const double norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= norm;
      residual += (next[i] - x[i]) * (next[i] - x[i]);
    }
    residual = std::sqrt(residual);
    x.swap(next);
    if (residual < tol) return x;
  }
  throw ConvergenceError(
      fmt::format("eigenvector centrality did not converge in {} iterations (residual {})",
                  max_iter, residual),
      residual, max_iter);
}

double influence(double centrality, std::int64_t followers) {
  if (!(centrality >= 0.0)) throw ValidationError("centrality must be >= 0");
  if (followers < 0) throw ValidationError("follower count must be >= 0");
  return centrality * std::log(static_cast<double>(followers) + 1.0);
}

std::vector<InfluenceRecord> influence_records(const UserNetwork& net,
                                               std::span<const double> centrality) {
  if (centrality.size() != net.size()) throw ValidationError("centrality size mismatch");
  std::vector<InfluenceRecord> out;
  out.reserve(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& p = net.profiles[i];
    out.push_back({net.users[i], centrality[i], p.follower_count,
                   influence(centrality[i], p.follower_count), p.mean_sentiment, p.tweet_count});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.influence != b.influence) return a.influence > b.influence;
    return a.user_id < b.user_id;
  });
  return out;
}

std::vector<SentimentBin> binned_influence_by_sentiment(std::span<const InfluenceRecord> records,
                                                        double bin_width, std::size_t min_users) {
  if (!(bin_width > 0.0)) throw ValidationError("bin width must be > 0");
  std::map<std::int64_t, std::vector<double>> bins;
  for (const auto& r : records) {
    if (std::isnan(r.mean_sentiment)) continue;
    // The small nudge keeps values like 0.15 / 0.05 from landing one bin low.
    const auto k = static_cast<std::int64_t>(std::floor(r.mean_sentiment / bin_width + 1e-9));
    bins[k].push_back(r.influence);
  }
  std::vector<SentimentBin> out;
  for (const auto& [k, values] : bins) {
    if (values.size() < min_users || values.empty()) continue;
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    SentimentBin b;
    b.low = tidy(static_cast<double>(k) * bin_width);
    b.high = tidy(static_cast<double>(k + 1) * bin_width);
    b.mean_influence = mean;
    b.std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    b.n = values.size();
    out.push_back(b);
  }
  return out;
}

void write_top_users(std::ostream& out, std::span<const InfluenceRecord> records,
                     std::size_t limit) {
  csv::write_row(out, {"user_id", "centrality", "followers", "tweet_count", "mean_sentiment",
                       "influence"});
  const std::size_t rows = limit == 0 ? records.size() : std::min(limit, records.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& r = records[i];
    csv::write_row(out, {r.user_id, format_double(r.centrality), std::to_string(r.follower_count),
                         std::to_string(r.tweet_count), format_double(r.mean_sentiment),
                         format_double(r.influence)});
  }
}

void write_bins(std::ostream& out, std::span<const SentimentBin> bins) {
  csv::write_row(out, {"bin_low", "bin_high", "mean_influence", "std_error", "n"});
  for (const auto& b : bins) {
    csv::write_row(out, {format_double(b.low), format_double(b.high),
                         format_double(b.mean_influence), format_double(b.std_error),
                         std::to_string(b.n)});
  }
}

}  // namespace hatewatch::usernet
