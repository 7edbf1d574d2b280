#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hatewatch/common.hpp"

namespace hatewatch::topics {

using TopicId = std::int32_t;

inline constexpr double kDefaultThreshold = 0.01;
// Probabilities below this are dropped at load.
inline constexpr double kDropBelow = 1e-6;
inline constexpr double kSumTolerance = 1e-6;

// Sparse topic distribution of one tweet, sorted by topic id.
struct TopicAssignment {
  std::string tweet_id;
  std::vector<std::pair<TopicId, double>> probs;

  // 0 when the topic is absent.
  double probability(TopicId topic) const noexcept;
};

// Builds an assignment, sorting by topic id. Throws ValidationError on a
// probability outside [0, 1], a repeated topic, or a sum above 1 + 1e-6.
TopicAssignment make_assignment(std::string tweet_id,
                                std::vector<std::pair<TopicId, double>> probs);

class TopicGroupMap {
 public:
  // Throws ValidationError if the topic is already mapped.
  void add(TopicId topic, std::string label, GroupSet groups);

  bool contains(TopicId topic) const { return entries_.contains(topic); }
  GroupSet groups_of(TopicId topic) const;
  const std::string& label(TopicId topic) const;
  // Sorted ids of every topic mapped to `group`.
  std::vector<TopicId> topics_in(Group group) const;
  // Sorted ids of every mapped topic.
  std::vector<TopicId> topics() const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    std::string label;
    GroupSet groups;
  };
  std::map<TopicId, Entry> entries_;
};

// Which tweets have their memberships extended by the threshold rule.
enum class ThresholdScope {
  // Every tweet belongs to each topic with probability >= theta.
  AllTweets,
  // Tweets whose most probable topic is the miscellaneous topic take every
  // other topic >= theta; all other tweets keep only their most probable topic.
  MiscellaneousOnly,
};

struct ThresholdPolicy {
  double theta = kDefaultThreshold;
  ThresholdScope scope = ThresholdScope::AllTweets;
  TopicId miscellaneous_topic = -1;
};

// Topics with probability >= theta, sorted. Throws ValidationError unless theta in (0, 1].
std::vector<TopicId> apply_threshold(const TopicAssignment& a, double theta);

std::vector<TopicId> thresholded_topics(const TopicAssignment& a, const ThresholdPolicy& policy);

// Groups reached by a tweet's thresholded topics.
GroupSet groups_of(const std::vector<TopicId>& thresholded, const TopicGroupMap& map);

// Ids of tweets whose thresholded topic set meets the group's topics.
std::set<std::string> select_group_tweets(const std::vector<TopicAssignment>& assignments,
                                          const TopicGroupMap& map, Group group,
                                          const ThresholdPolicy& policy = {});
// Throws ValidationError for an unknown group label.
std::set<std::string> select_group_tweets(const std::vector<TopicAssignment>& assignments,
                                          const TopicGroupMap& map, std::string_view group,
                                          const ThresholdPolicy& policy = {});

// JSON Lines `{"tweet_id": ..., "topics": [{"id": ..., "p": ...}]}`.
// Bad lines and repeated tweet ids become rejects.
LoadResult<TopicAssignment> read_assignments(std::istream& in);
void write_assignments(std::ostream& out, const std::vector<TopicAssignment>& assignments);

// CSV `topic_id,label,groups` with `|`-separated groups (may be empty).
// Throws ValidationError naming the line on any problem.
TopicGroupMap read_group_map(std::istream& in);
void write_group_map(std::ostream& out, const TopicGroupMap& map);

}  // namespace hatewatch::topics
