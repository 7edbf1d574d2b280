#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hatewatch/common.hpp"
#include "hatewatch/ingest.hpp"
#include "hatewatch/topics.hpp"

namespace hatewatch::usernet {

struct NetworkOptions {
  // Users need at least this many tweets in the supplied tweet set.
  std::size_t min_tweets = 10;
  // Decides which tweets count as the group's (for mean sentiment).
  topics::ThresholdPolicy threshold;
  // Zero out probabilities below theta before computing weights.
  bool threshold_weights = false;
  // Weights below this become 0. 0 keeps the complete graph.
  double prune_epsilon = 0.0;
};

struct UserProfile {
  std::int64_t follower_count = 0;  // maximum over the user's tweets
  std::size_t tweet_count = 0;
  // Mean over the user's scored tweets in the group; NaN if none.
  double mean_sentiment = 0.0;
};

struct UserNetwork {
  Group group = Group::Black;
  // Sorted.
  std::vector<std::string> users;
  std::vector<UserProfile> profiles;
  // Row-major n x n, symmetric, zero diagonal.
  std::vector<double> weights;

  std::size_t size() const noexcept { return users.size(); }
  double weight(std::size_t a, std::size_t b) const { return weights[a * users.size() + b]; }
};

// w_AB = sum over tweet pairs (t1 in T_A, t2 in T_B) and topics tau in L of
// t1(tau) * t2(tau). Users qualify on their total tweet count; of those, only
// users with some probability mass on L are kept. Tweets without an
// assignment are counted for activity but carry no topics.
// Throws ValidationError when L is empty, min_tweets < 1 or fewer than 2 users remain.
UserNetwork build_network(std::span<const ingest::TweetRecord> tweets,
                          const std::vector<topics::TopicAssignment>& assignments,
                          std::span<const topics::TopicId> group_topics, Group group,
                          const NetworkOptions& options = {});

// Dominant eigenvector of the weight matrix by power iteration on (W + I),
// L2-normalised with non-negative entries. Throws ValidationError if no
// weight is positive, ConvergenceError when the L2 step stays >= tol.
std::vector<double> eigenvector_centrality(const UserNetwork& net, double tol = 1e-10,
                                           int max_iter = 1000);

// c * ln(f + 1). Throws ValidationError on negative inputs.
double influence(double centrality, std::int64_t followers);

struct InfluenceRecord {
  std::string user_id;
  double centrality = 0.0;
  std::int64_t follower_count = 0;
  double influence = 0.0;
  double mean_sentiment = 0.0;
  std::size_t tweet_count = 0;
};

// One record per network user, ordered by influence descending then user id.
std::vector<InfluenceRecord> influence_records(const UserNetwork& net,
                                               std::span<const double> centrality);

struct SentimentBin {
  double low = 0.0;
  double high = 0.0;
  double mean_influence = 0.0;
  // Sample standard deviation over sqrt(n); 0 when n == 1.
  double std_error = 0.0;
  std::size_t n = 0;
};

// Bins [k*w, (k+1)*w) over mean sentiment, ascending; bins with fewer than
// min_users users are omitted, as are users with NaN sentiment.
// Throws ValidationError unless bin_width > 0.
std::vector<SentimentBin> binned_influence_by_sentiment(std::span<const InfluenceRecord> records,
                                                        double bin_width = 0.05,
                                                        std::size_t min_users = 10);

// `user_id,centrality,followers,tweet_count,mean_sentiment,influence`; at most `limit` rows (0 = all).
void write_top_users(std::ostream& out, std::span<const InfluenceRecord> records,
                     std::size_t limit = 0);
// `bin_low,bin_high,mean_influence,std_error,n`
void write_bins(std::ostream& out, std::span<const SentimentBin> bins);

}  // namespace hatewatch::usernet
