#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hatewatch/common.hpp"

namespace hatewatch::ingest {

struct KeywordEntry {
  std::string phrase;
  Group group;
  bool operator==(const KeywordEntry&) const = default;
};

// Ordered list of (phrase, group) pairs. Phrases are lowercase; a pair occurs at most once.
class KeywordList {
 public:
  KeywordList() = default;
  KeywordList(std::initializer_list<KeywordEntry> entries);

  // Returns false when the pair is already present. Throws ValidationError if
  // the phrase is empty or has uppercase ASCII letters.
  bool add(std::string phrase, Group group);

  const std::vector<KeywordEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(std::string_view phrase, Group group) const;

 private:
  std::vector<KeywordEntry> entries_;
};

struct KeywordMatch {
  std::string phrase;
  Group group;
  bool operator==(const KeywordMatch&) const = default;
};

struct TweetRecord {
  std::string tweet_id;
  Timestamp created_at = 0;
  std::string text;
  std::string clean_text;
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
  std::optional<std::string> in_reply_to_user_id;
  std::string user_id;
  std::string screen_name;
  std::int64_t follower_count = 0;
  std::optional<std::string> lang;

  // Filled by filter_tweets.
  std::vector<KeywordMatch> matched_keywords;
  // Filled by the sentiment stage.
  std::optional<double> sentiment;
  bool strong_sentiment = false;
};

// Motivating bias vocabulary for crime records.
enum class Bias : std::uint8_t {
  AntiBlack,
  AntiAsian,
  AntiHispanic,
  AntiJewish,
  AntiGayMale,
  AntiLesbian,
  AntiLGBT,
  AntiBisexual,
  AntiTransgender,
  AntiGenderNonConforming,
  AntiWhite,
  AntiArab,
  AntiMuslim,
  Other,
};

std::string_view to_string(Bias b) noexcept;
// Case-insensitive; accepts the labels produced by to_string.
std::optional<Bias> parse_bias(std::string_view label) noexcept;
// Group a bias targets, if it is one of the five.
std::optional<Group> target_group(Bias b) noexcept;

struct CrimeRecord {
  std::string incident_id;
  Date date;
  Bias bias = Bias::Other;
  std::string offense;
  std::string location_type;
};

// NFKC-normalize, lowercase, drop every character that is not an ASCII letter
// or digit, and collapse whitespace runs to single spaces. Idempotent.
std::string clean_text(std::string_view raw);

// Base phrases plus plural ("s"), space-removed and hyphenated variants
// (and the plurals of those). Order: base-list order, variants in that order.
KeywordList augment_keywords(const KeywordList& base);

// Finds keyword phrases as contiguous token runs in cleaned text. Phrases are
// themselves cleaned before matching, so "george-floyd" matches "georgefloyd".
class KeywordMatcher {
 public:
  explicit KeywordMatcher(const KeywordList& keywords);

  // Every matching entry, in keyword-list order.
  std::vector<KeywordMatch> match(std::string_view clean) const;

 private:
  struct Pattern {
    std::vector<std::string> tokens;
    std::size_t entry = 0;
  };
  std::vector<KeywordEntry> entries_;
  std::unordered_map<std::string, std::vector<Pattern>> by_first_token_;
};

// Keeps tweets with at least one keyword match and tags them with all matches.
// Tweets with an empty clean_text have it computed from text first.
std::vector<TweetRecord> filter_tweets(std::vector<TweetRecord> tweets,
                                       const KeywordList& keywords);

nlohmann::json to_json(const TweetRecord& t);
// Throws ValidationError describing the first problem found.
TweetRecord tweet_from_json(const nlohmann::json& j);

// JSON Lines reader. Blank lines are skipped; malformed lines and duplicate
// tweet ids are rejected with their 1-based line number.
LoadResult<TweetRecord> read_tweets(std::istream& in);
void write_tweets(std::ostream& out, const std::vector<TweetRecord>& tweets);

// Header `incident_id,date,bias,offense,location_type`. Rows outside `range`
// are dropped; output is sorted by (date, incident_id). Throws ValidationError
// on a bad header.
LoadResult<CrimeRecord> load_crimes(std::istream& in, DateRange range);
void write_crimes(std::ostream& out, const std::vector<CrimeRecord>& crimes);

// Header `phrase,group`. Phrases are trimmed and ASCII-lowercased.
// Throws ValidationError on a bad header, unknown group or empty phrase.
KeywordList read_keywords(std::istream& in);
void write_keywords(std::ostream& out, const KeywordList& keywords);

// JSON Lines of {"line_number": n, "reason": "..."}.
void write_rejects(std::ostream& out, const std::vector<Reject>& rejects);

}  // namespace hatewatch::ingest
