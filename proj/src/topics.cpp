#include "hatewatch/topics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "hatewatch/csv.hpp"

namespace hatewatch::topics {

using nlohmann::json;

double TopicAssignment::probability(TopicId topic) const noexcept {
  const auto it = std::lower_bound(probs.begin(), probs.end(), topic,
                                   [](const auto& p, TopicId t) { return p.first < t; });
  return it != probs.end() && it->first == topic ? it->second : 0.0;
}

TopicAssignment make_assignment(std::string tweet_id,
                                std::vector<std::pair<TopicId, double>> probs) {
  double sum = 0.0;
  for (const auto& [id, p] : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError(fmt::format("probability {} of topic {} outside [0, 1]", p, id));
    }
    sum += p;
  }
  if (sum > 1.0 + kSumTolerance) {
    throw ValidationError(fmt::format("topic probabilities of {} sum to {}", tweet_id, sum));
  }
  std::sort(probs.begin(), probs.end());
  const auto dup = std::adjacent_find(probs.begin(), probs.end(),
                                      [](const auto& a, const auto& b) { return a.first == b.first; });
  if (dup != probs.end()) {
    throw ValidationError(fmt::format("topic {} repeated for tweet {}", dup->first, tweet_id));
  }
  std::erase_if(probs, [](const auto& p) { return p.second < kDropBelow; });
  return {std::move(tweet_id), std::move(probs)};
}

void TopicGroupMap::add(TopicId topic, std::string label, GroupSet groups) {
  if (!entries_.emplace(topic, Entry{std::move(label), groups}).second) {
    throw ValidationError(fmt::format("topic {} mapped twice", topic));
  }
}

GroupSet TopicGroupMap::groups_of(TopicId topic) const {
  const auto it = entries_.find(topic);
  return it == entries_.end() ? GroupSet{} : it->second.groups;
}

const std::string& TopicGroupMap::label(TopicId topic) const {
  const auto it = entries_.find(topic);
  if (it == entries_.end()) throw ValidationError(fmt::format("topic {} is not mapped", topic));
  return it->second.label;
}

std::vector<TopicId> TopicGroupMap::topics_in(Group group) const {
  std::vector<TopicId> out;
  for (const auto& [id, e] : entries_) {
    if (e.groups.contains(group)) out.push_back(id);
  }
  return out;
}

std::vector<TopicId> TopicGroupMap::topics() const {
  std::vector<TopicId> out;
  out.reserve(entries_.size());
  for (const auto& [id, e] : entries_) out.push_back(id);
  return out;
}

std::vector<TopicId> apply_threshold(const TopicAssignment& a, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw ValidationError(fmt::format("topic threshold {} outside (0, 1]", theta));
  }
  std::vector<TopicId> out;
  for (const auto& [id, p] : a.probs) {
    if (p >= theta) out.push_back(id);
  }
  return out;
}

std::vector<TopicId> thresholded_topics(const TopicAssignment& a, const ThresholdPolicy& policy) {
  if (policy.scope == ThresholdScope::AllTweets) return apply_threshold(a, policy.theta);
  if (a.probs.empty()) return {};
  // Most probable topic; ties go to the smaller id.
  const auto top = std::max_element(a.probs.begin(), a.probs.end(), [](const auto& x, const auto& y) {
    return x.second < y.second || (x.second == y.second && x.first > y.first);
  });
  if (top->first != policy.miscellaneous_topic) return {top->first};
  auto out = apply_threshold(a, policy.theta);
  std::erase(out, policy.miscellaneous_topic);
  return out;
}

GroupSet groups_of(const std::vector<TopicId>& thresholded, const TopicGroupMap& map) {
  GroupSet gs;
  for (TopicId t : thresholded) gs |= map.groups_of(t);
  return gs;
}

std::set<std::string> select_group_tweets(const std::vector<TopicAssignment>& assignments,
                                          const TopicGroupMap& map, Group group,
                                          const ThresholdPolicy& policy) {
  std::set<std::string> out;
  for (const auto& a : assignments) {
    if (groups_of(thresholded_topics(a, policy), map).contains(group)) out.insert(a.tweet_id);
  }
  return out;
}

std::set<std::string> select_group_tweets(const std::vector<TopicAssignment>& assignments,
                                          const TopicGroupMap& map, std::string_view group,
                                          const ThresholdPolicy& policy) {
  return select_group_tweets(assignments, map, require_group(group), policy);
}

LoadResult<TopicAssignment> read_assignments(std::istream& in) {
  LoadResult<TopicAssignment> result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw ValidationError("line is not a JSON object");
      const auto& id = j.at("tweet_id");
      std::string tweet_id = id.is_string() ? id.get<std::string>() : id.dump();
      std::vector<std::pair<TopicId, double>> probs;
      for (const auto& t : j.at("topics")) {
        probs.emplace_back(t.at("id").get<TopicId>(), t.at("p").get<double>());
      }
      auto a = make_assignment(std::move(tweet_id), std::move(probs));
      if (!seen.insert(a.tweet_id).second) {
        result.rejects.push_back({n, "duplicate tweet_id " + a.tweet_id});
        continue;
      }
      result.records.push_back(std::move(a));
    } catch (const json::exception& e) {
      result.rejects.push_back({n, std::string("invalid assignment: ") + e.what()});
    } catch (const ValidationError& e) {
      result.rejects.push_back({n, e.what()});
    }
  }
  return result;
}

void write_assignments(std::ostream& out, const std::vector<TopicAssignment>& assignments) {
  for (const auto& a : assignments) {
    json topics = json::array();
    for (const auto& [id, p] : a.probs) topics.push_back({{"id", id}, {"p", p}});
    out << json{{"tweet_id", a.tweet_id}, {"topics", std::move(topics)}}.dump() << '\n';
  }
}

TopicGroupMap read_group_map(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"topic_id", "label", "groups"});
  TopicGroupMap map;
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    const auto where = [&] { return fmt::format("group map line {}", reader.line()); };
    if (row->size() != 3) throw ValidationError(where() + ": expected 3 fields");
    TopicId id = 0;
    const auto& text = (*row)[0];
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
    if (ec != std::errc{} || p != text.data() + text.size()) {
      throw ValidationError(where() + fmt::format(": bad topic id '{}'", text));
    }
    GroupSet groups;
    std::string_view rest = (*row)[2];
    while (!rest.empty()) {
      const auto bar = rest.find('|');
      const auto label = rest.substr(0, bar);
      const auto g = parse_group(label);
      if (!g) throw ValidationError(where() + fmt::format(": unknown group '{}'", label));
      groups.insert(*g);
      if (bar == std::string_view::npos) break;
      rest.remove_prefix(bar + 1);
    }
    try {
      map.add(id, (*row)[1], groups);
    } catch (const ValidationError& e) {
      throw ValidationError(where() + ": " + e.what());
    }
  }
  return map;
}

void write_group_map(std::ostream& out, const TopicGroupMap& map) {
  csv::write_row(out, {"topic_id", "label", "groups"});
  for (TopicId id : map.topics()) {
    std::vector<std::string> labels;
    const GroupSet gs = map.groups_of(id);
    for (Group g : kAllGroups) {
      if (gs.contains(g)) labels.emplace_back(to_string(g));
    }
    csv::write_row(out, {std::to_string(id), map.label(id), fmt::format("{}", fmt::join(labels, "|"))});
  }
}

}  // namespace hatewatch::topics
