#include "hatewatch/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "hatewatch/csv.hpp"

namespace hatewatch::ingest {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Bias, std::string_view>, 14> kBiasLabels{{
    {Bias::AntiBlack, "anti-Black"},
    {Bias::AntiAsian, "anti-Asian"},
    {Bias::AntiHispanic, "anti-Hispanic"},
    {Bias::AntiJewish, "anti-Jewish"},
    {Bias::AntiGayMale, "anti-Gay-Male"},
    {Bias::AntiLesbian, "anti-Lesbian"},
    {Bias::AntiLGBT, "anti-LGBT"},
    {Bias::AntiBisexual, "anti-Bisexual"},
    {Bias::AntiTransgender, "anti-Transgender"},
    {Bias::AntiGenderNonConforming, "anti-Gender-Non-Conforming"},
    {Bias::AntiWhite, "anti-White"},
    {Bias::AntiArab, "anti-Arab"},
    {Bias::AntiMuslim, "anti-Muslim"},
    {Bias::Other, "other"},
}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_tokens(std::string_view clean) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < clean.size()) {
    const std::size_t j = clean.find(' ', i);
    const std::size_t end = j == std::string_view::npos ? clean.size() : j;
    if (end > i) out.emplace_back(clean.substr(i, end - i));
    i = end + 1;
  }
  return out;
}

class Cleaner {
 public:
  void push(UChar32 c) {
    if (c < 128 && std::isalnum(static_cast<int>(c))) {
      if (pending_space_ && !out_.empty()) out_.push_back(' ');
      pending_space_ = false;
      out_.push_back(static_cast<char>(std::tolower(static_cast<int>(c))));
    } else if (u_isUWhiteSpace(c) || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
               c == '\f') {
      pending_space_ = true;
    }
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
  bool pending_space_ = false;
};

std::string string_or_integer(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw ValidationError(fmt::format("missing field '{}'", key));
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return it->dump();
  throw ValidationError(fmt::format("field '{}' must be a string", key));
}

std::vector<std::string> string_list(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_array()) throw ValidationError(fmt::format("field '{}' must be an array", key));
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      out.push_back(v.dump());
    } else if (v.is_object() && v.contains("id")) {
      out.push_back(string_or_integer(v, "id"));
    } else {
      throw ValidationError(fmt::format("field '{}' has a non-string element", key));
    }
  }
  return out;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return it->dump();
  throw ValidationError(fmt::format("field '{}' must be a string", key));
}

}  // namespace

KeywordList::KeywordList(std::initializer_list<KeywordEntry> entries) {
  for (const auto& e : entries) add(e.phrase, e.group);
}

bool KeywordList::add(std::string phrase, Group group) {
  if (phrase.empty()) throw ValidationError("keyword phrase is empty");
  if (std::any_of(phrase.begin(), phrase.end(),
                  [](char c) { return std::isupper(static_cast<unsigned char>(c)); })) {
    throw ValidationError(fmt::format("keyword phrase '{}' is not lowercase", phrase));
  }
  if (contains(phrase, group)) return false;
  entries_.push_back({std::move(phrase), group});
  return true;
}

bool KeywordList::contains(std::string_view phrase, Group group) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const KeywordEntry& e) {
    return e.group == group && e.phrase == phrase;
  });
}

std::string_view to_string(Bias b) noexcept {
  for (const auto& [bias, label] : kBiasLabels) {
    if (bias == b) return label;
  }
  return "other";
}

std::optional<Bias> parse_bias(std::string_view label) noexcept {
  for (const auto& [bias, text] : kBiasLabels) {
    if (iequals(text, label)) return bias;
  }
  return std::nullopt;
}

std::optional<Group> target_group(Bias b) noexcept {
  switch (b) {
    case Bias::AntiBlack:
      return Group::Black;
    case Bias::AntiAsian:
      return Group::Asian;
    case Bias::AntiHispanic:
      return Group::Hispanic;
    case Bias::AntiJewish:
      return Group::Jewish;
    case Bias::AntiGayMale:
    case Bias::AntiLesbian:
    case Bias::AntiLGBT:
    case Bias::AntiBisexual:
    case Bias::AntiTransgender:
    case Bias::AntiGenderNonConforming:
      return Group::LGBTQ;
    default:
      return std::nullopt;
  }
}

std::string clean_text(std::string_view raw) {
  Cleaner cleaner;
  const bool ascii = std::all_of(raw.begin(), raw.end(),
                                 [](char c) { return static_cast<unsigned char>(c) < 128; });
  if (ascii) {
    for (char c : raw) cleaner.push(static_cast<unsigned char>(c));
    return cleaner.take();
  }

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  const icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<std::int32_t>(raw.size())));
  icu::UnicodeString normalized = U_SUCCESS(status) ? nfkc->normalize(source, status) : source;
  if (U_FAILURE(status)) normalized = source;

  for (std::int32_t i = 0; i < normalized.length();) {
    const UChar32 c = normalized.char32At(i);
    cleaner.push(c);
    i += U16_LENGTH(c);
  }
  return cleaner.take();
}

KeywordList augment_keywords(const KeywordList& base) {
  KeywordList out;
  for (const auto& [phrase, group] : base.entries()) {
    out.add(phrase, group);
    out.add(phrase + "s", group);
    if (phrase.find(' ') == std::string::npos) continue;
    std::string joined;
    std::string hyphenated;
    for (char c : phrase) {
      if (c != ' ') joined.push_back(c);
      hyphenated.push_back(c == ' ' ? '-' : c);
    }
    out.add(joined, group);
    out.add(joined + "s", group);
    out.add(hyphenated, group);
    out.add(hyphenated + "s", group);
  }
  return out;
}

KeywordMatcher::KeywordMatcher(const KeywordList& keywords) : entries_(keywords.entries()) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto tokens = split_tokens(clean_text(entries_[i].phrase));
    if (tokens.empty()) continue;
    auto& bucket = by_first_token_[tokens.front()];
    bucket.push_back({std::move(tokens), i});
  }
}

std::vector<KeywordMatch> KeywordMatcher::match(std::string_view clean) const {
  const auto tokens = split_tokens(clean);
  std::set<std::size_t> hits;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto it = by_first_token_.find(tokens[i]);
    if (it == by_first_token_.end()) continue;
    for (const auto& pattern : it->second) {
      if (hits.contains(pattern.entry) || i + pattern.tokens.size() > tokens.size()) continue;
      if (std::equal(pattern.tokens.begin() + 1, pattern.tokens.end(), tokens.begin() + i + 1)) {
        hits.insert(pattern.entry);
      }
    }
  }
  std::vector<KeywordMatch> out;
  out.reserve(hits.size());
  for (std::size_t idx : hits) out.push_back({entries_[idx].phrase, entries_[idx].group});
  return out;
}

std::vector<TweetRecord> filter_tweets(std::vector<TweetRecord> tweets,
                                       const KeywordList& keywords) {
  const KeywordMatcher matcher(keywords);
  std::vector<TweetRecord> kept;
  for (auto& t : tweets) {
    if (t.clean_text.empty()) t.clean_text = clean_text(t.text);
    t.matched_keywords = matcher.match(t.clean_text);
    if (!t.matched_keywords.empty()) kept.push_back(std::move(t));
  }
  return kept;
}

json to_json(const TweetRecord& t) {
  json j;
  j["tweet_id"] = t.tweet_id;
  j["created_at"] = format_timestamp(t.created_at);
  j["text"] = t.text;
  j["clean_text"] = t.clean_text;
  j["hashtags"] = t.hashtags;
  j["mentions"] = t.mentions;
  if (t.in_reply_to_user_id) j["in_reply_to_user_id"] = *t.in_reply_to_user_id;
  j["user_id"] = t.user_id;
  j["screen_name"] = t.screen_name;
  j["follower_count"] = t.follower_count;
  j["lang"] = t.lang ? json(*t.lang) : json(nullptr);
  if (!t.matched_keywords.empty()) {
    json matches = json::array();
    for (const auto& m : t.matched_keywords) {
      matches.push_back({{"phrase", m.phrase}, {"group", to_string(m.group)}});
    }
    j["matched_keywords"] = std::move(matches);
  }
  if (t.sentiment) {
    j["sentiment_compound"] = *t.sentiment;
    j["sentiment_strong"] = t.strong_sentiment;
  }
  return j;
}

TweetRecord tweet_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("line is not a JSON object");
  TweetRecord t;
  t.tweet_id = string_or_integer(j, "tweet_id");
  if (t.tweet_id.empty()) throw ValidationError("empty tweet_id");
  const auto created = j.find("created_at");
  if (created == j.end() || !created->is_string()) {
    throw ValidationError("missing field 'created_at'");
  }
  t.created_at = parse_timestamp(created->get<std::string>());
  const auto text = j.find("text");
  if (text == j.end() || !text->is_string()) throw ValidationError("missing field 'text'");
  t.text = text->get<std::string>();
  if (auto clean = optional_string(j, "clean_text")) t.clean_text = std::move(*clean);
  t.hashtags = string_list(j, "hashtags");
  t.mentions = string_list(j, "mentions");
  t.in_reply_to_user_id = optional_string(j, "in_reply_to_user_id");
  t.user_id = string_or_integer(j, "user_id");
  if (t.user_id.empty()) throw ValidationError("empty user_id");
  t.screen_name = optional_string(j, "screen_name").value_or("");
  const auto followers = j.find("follower_count");
  if (followers == j.end() || !followers->is_number_integer()) {
    throw ValidationError("field 'follower_count' must be an integer");
  }
  t.follower_count = followers->get<std::int64_t>();
  if (t.follower_count < 0) throw ValidationError("negative follower_count");
  t.lang = optional_string(j, "lang");
  if (const auto m = j.find("matched_keywords"); m != j.end() && m->is_array()) {
    for (const auto& e : *m) {
      t.matched_keywords.push_back(
          {e.at("phrase").get<std::string>(), require_group(e.at("group").get<std::string>())});
    }
  }
  if (const auto s = j.find("sentiment_compound"); s != j.end() && !s->is_null()) {
    if (!s->is_number()) throw ValidationError("field 'sentiment_compound' must be a number");
    t.sentiment = s->get<double>();
    const auto strong = j.find("sentiment_strong");
    if (strong == j.end() || !strong->is_boolean()) {
      throw ValidationError("field 'sentiment_strong' must be a boolean");
    }
    t.strong_sentiment = strong->get<bool>();
  }
  return t;
}

LoadResult<TweetRecord> read_tweets(std::istream& in) {
  LoadResult<TweetRecord> result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    try {
      auto tweet = tweet_from_json(json::parse(line));
      if (!seen.insert(tweet.tweet_id).second) {
        result.rejects.push_back({line_number, "duplicate tweet_id " + tweet.tweet_id});
        continue;
      }
      result.records.push_back(std::move(tweet));
    } catch (const json::exception& e) {
      result.rejects.push_back({line_number, std::string("invalid JSON: ") + e.what()});
    } catch (const ValidationError& e) {
      result.rejects.push_back({line_number, e.what()});
    }
  }
  return result;
}

void write_tweets(std::ostream& out, const std::vector<TweetRecord>& tweets) {
  for (const auto& t : tweets) out << to_json(t).dump() << '\n';
}

LoadResult<CrimeRecord> load_crimes(std::istream& in, DateRange range) {
  if (range.last < range.first) throw ValidationError("crime date range ends before it starts");
  csv::Reader reader(in);
  csv::expect_header(reader, {"incident_id", "date", "bias", "offense", "location_type"});
  LoadResult<CrimeRecord> result;
  std::unordered_set<std::string> seen;
  while (auto row = reader.next()) {
    if (row->size() == 1 && trim((*row)[0]).empty()) continue;
    if (row->size() != 5) {
      result.rejects.push_back(
          {reader.line(), fmt::format("expected 5 fields, found {}", row->size())});
      continue;
    }
    CrimeRecord c;
    c.incident_id = std::string(trim((*row)[0]));
    if (c.incident_id.empty()) {
      result.rejects.push_back({reader.line(), "empty incident_id"});
      continue;
    }
    try {
      c.date = Date::parse(trim((*row)[1]));
    } catch (const ValidationError& e) {
      result.rejects.push_back({reader.line(), e.what()});
      continue;
    }
    const auto bias = parse_bias(trim((*row)[2]));
    if (!bias) {
      result.rejects.push_back({reader.line(), fmt::format("unknown bias label '{}'", (*row)[2])});
      continue;
    }
    c.bias = *bias;
    c.offense = std::string(trim((*row)[3]));
    c.location_type = std::string(trim((*row)[4]));
    if (!seen.insert(c.incident_id).second) {
      result.rejects.push_back({reader.line(), "duplicate incident_id " + c.incident_id});
      continue;
    }
    if (range.contains(c.date)) result.records.push_back(std::move(c));
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const CrimeRecord& a, const CrimeRecord& b) {
              return std::tie(a.date, a.incident_id) < std::tie(b.date, b.incident_id);
            });
  if (result.records.empty()) {
    result.warnings.push_back(fmt::format("no crime records between {} and {}",
                                          range.first.to_string(), range.last.to_string()));
  }
  return result;
}

void write_crimes(std::ostream& out, const std::vector<CrimeRecord>& crimes) {
  csv::write_row(out, {"incident_id", "date", "bias", "offense", "location_type"});
  for (const auto& c : crimes) {
    csv::write_row(out, {c.incident_id, c.date.to_string(), std::string(to_string(c.bias)),
                         c.offense, c.location_type});
  }
}

KeywordList read_keywords(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"phrase", "group"});
  KeywordList list;
  while (auto row = reader.next()) {
    if (row->size() == 1 && trim((*row)[0]).empty()) continue;
    if (row->size() != 2) {
      throw ValidationError(fmt::format("keywords line {}: expected 2 fields", reader.line()));
    }
    std::string phrase(trim((*row)[0]));
    std::transform(phrase.begin(), phrase.end(), phrase.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const auto group = parse_group(trim((*row)[1]));
    if (!group) {
      throw ValidationError(
          fmt::format("keywords line {}: unknown group '{}'", reader.line(), (*row)[1]));
    }
    if (phrase.empty()) {
      throw ValidationError(fmt::format("keywords line {}: empty phrase", reader.line()));
    }
    list.add(std::move(phrase), *group);
  }
  return list;
}

void write_keywords(std::ostream& out, const KeywordList& keywords) {
  csv::write_row(out, {"phrase", "group"});
  for (const auto& e : keywords.entries()) {
    csv::write_row(out, {e.phrase, std::string(to_string(e.group))});
  }
}

void write_rejects(std::ostream& out, const std::vector<Reject>& rejects) {
  for (const auto& r : rejects) {
    out << json{{"line_number", r.line_number}, {"reason", r.reason}}.dump() << '\n';
  }
}

}  // namespace hatewatch::ingest
