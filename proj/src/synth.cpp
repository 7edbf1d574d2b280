#include "hatewatch/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hatewatch/ingest.hpp"
#include "hatewatch/topics.hpp"

namespace hatewatch::synth {

namespace fs = std::filesystem;

namespace {

struct Word {
  const char* token;
  double valence;
};

constexpr std::array<Word, 16> kPositive{{{"love", 3.2},     {"support", 1.7},  {"proud", 2.1},
                                          {"hope", 1.9},     {"together", 1.2}, {"respect", 2.1},
                                          {"peace", 2.4},    {"beautiful", 2.9}, {"celebrate", 2.7},
                                          {"thank", 1.9},    {"strong", 2.3},   {"safe", 1.9},
                                          {"kind", 2.4},     {"equality", 1.6}, {"justice", 1.5},
                                          {"welcome", 2.0}}};
constexpr std::array<Word, 16> kNegative{{{"hate", -2.7},    {"attack", -2.1},   {"violence", -3.1},
                                          {"disgusting", -3.0}, {"angry", -2.3}, {"fear", -2.2},
                                          {"kill", -3.7},    {"evil", -3.4},     {"ugly", -2.7},
                                          {"stupid", -2.4},  {"terrible", -2.5}, {"sick", -1.9},
                                          {"racist", -3.1},  {"crime", -2.5},    {"blame", -1.4},
                                          {"threat", -2.4}}};
constexpr std::array<Word, 7> kBoosters{{{"very", 0.293},     {"so", 0.293},     {"extremely", 0.293},
                                         {"really", 0.293},   {"totally", 0.293}, {"barely", -0.293},
                                         {"slightly", -0.293}}};
constexpr std::array<const char*, 9> kNegators{"not",  "never", "no",     "dont",   "cant",
                                               "wont", "isnt",  "nobody", "nothing"};
constexpr std::array<const char*, 24> kFiller{
    "the",  "people", "today",  "news",   "city",      "california", "we",      "they",
    "this", "is",     "about",  "for",    "in",        "our",        "community", "street",
    "online", "video", "police", "again", "everyone", "week",       "la",      "sf"};

struct GroupVocab {
  Group group;
  std::array<const char*, 4> keywords;
  std::array<const char*, 3> hashtags;
  std::array<const char*, 3> topics;
  double share;      // of keyword tweets
  double crime_share;
  double mood_shift;
};

const std::array<GroupVocab, 5> kGroups{{
    {Group::Black, {"black lives matter", "blm", "george floyd", "racism"},
     {"BlackLivesMatter", "BLM", "JusticeForGeorgeFloyd"},
     {"protests", "police_reform", "racial_justice"}, 0.36, 0.32, -0.25},
    {Group::Asian, {"asian hate", "stop asian hate", "kung flu", "chinese virus"},
     {"StopAsianHate", "StopAAPIHate", "Covid19"},
     {"covid_blame", "aapi_solidarity", "asian_attacks"}, 0.17, 0.17, -0.15},
    {Group::LGBTQ, {"lgbtq", "gay", "transgender", "pride month"},
     {"Pride", "LoveIsLove", "TransLivesMatter"},
     {"pride_events", "trans_rights", "marriage_equality"}, 0.25, 0.16, 0.25},
    {Group::Hispanic, {"latino", "hispanic", "illegal alien", "latinx"},
     {"Latinx", "Immigration", "DACA"},
     {"immigration", "border", "latino_voters"}, 0.12, 0.10, -0.05},
    {Group::Jewish, {"jewish", "antisemitism", "jews", "synagogue"},
     {"Antisemitism", "NeverAgain", "Shabbat"},
     {"antisemitism", "holidays", "israel_debate"}, 0.10, 0.10, 0.0},
}};

struct Spike {
  Group group;
  int y;
  unsigned m;
  unsigned d;
  double amplitude;
  double sigma;
};

constexpr std::array<Spike, 8> kSpikes{{{Group::Black, 2020, 5, 27, 6.0, 8.0},
                                        {Group::Black, 2020, 8, 25, 2.0, 6.0},
                                        {Group::Asian, 2020, 3, 20, 3.0, 10.0},
                                        {Group::Asian, 2021, 3, 17, 4.0, 10.0},
                                        {Group::LGBTQ, 2020, 6, 15, 3.0, 10.0},
                                        {Group::Hispanic, 2020, 9, 15, 1.5, 15.0},
                                        {Group::Jewish, 2020, 10, 10, 1.5, 10.0},
                                        {Group::Jewish, 2021, 5, 20, 2.5, 8.0}}};

constexpr topics::TopicId kMiscTopic = -1;
constexpr topics::TopicId kSharedTopic = 60;
constexpr topics::TopicId kFirstChatterTopic = 90;
constexpr int kChatterTopics = 5;

topics::TopicId group_topic(std::size_t group_index, std::size_t k) {
  return static_cast<topics::TopicId>(group_index * 10 + 1 + k);
}

// Portable sampling on top of the raw engine output.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool chance(double p) { return uniform() < p; }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  template <typename T, std::size_t N>
  const T& pick(const std::array<T, N>& a) {
    return a[below(N)];
  }

 private:
  std::mt19937_64 rng_;
};

class Cumulative {
 public:
  explicit Cumulative(const std::vector<double>& weights) : cdf_(weights.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) cdf_[i] = acc += weights[i];
  }
  std::size_t sample(Sampler& s) const {
    const double x = s.uniform() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

Cumulative day_weights(Group g, DateRange range) {
  std::vector<double> w(static_cast<std::size_t>(range.length()), 1.0);
  for (const auto& s : kSpikes) {
    if (s.group != g) continue;
    const double center = static_cast<double>(Date::from_ymd(s.y, s.m, s.d) - range.first);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double z = (static_cast<double>(i) - center) / s.sigma;
      w[i] += s.amplitude * std::exp(-0.5 * z * z);
    }
  }
  return Cumulative(w);
}

struct User {
  std::string id;
  std::string screen_name;
  std::size_t group = 0;
  std::size_t favourite_topic = 0;
  double mood = 0.0;
  std::int64_t followers = 0;
};

std::ofstream open_output(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

void write_lexicon(std::ostream& out) {
  out << "# token\tvalence\n";
  for (const auto& w : kPositive) out << w.token << '\t' << format_double(w.valence) << '\n';
  for (const auto& w : kNegative) out << w.token << '\t' << format_double(w.valence) << '\n';
}

void write_modifiers(std::ostream& out) {
  out << "# token\tkind\tvalue\n";
  for (const auto& b : kBoosters) out << b.token << "\tbooster\t" << format_double(b.valence) << '\n';
  for (const char* n : kNegators) out << n << "\tnegator\n";
}

Summary generate(const fs::path& dir, const Options& opt) {
  if (opt.users < 2) throw ValidationError("synthetic corpus needs at least 2 users");
  if (opt.tweet_range.last < opt.tweet_range.first || opt.crime_range.last < opt.crime_range.first) {
    throw ValidationError("synthetic date range ends before it starts");
  }
  fs::create_directories(dir);
  Sampler s(opt.seed);
  Summary summary;

  // Users: heavy-tailed activity, a home group, a favourite topic and a mood.
  std::vector<double> group_shares;
  for (const auto& g : kGroups) group_shares.push_back(g.share);
  const Cumulative group_pick(group_shares);
  std::vector<User> users(opt.users);
  std::vector<double> activity(opt.users);
  std::array<std::vector<std::size_t>, 5> members;
  for (std::size_t i = 0; i < opt.users; ++i) {
    auto& u = users[i];
    u.id = std::to_string(100000 + i);
    u.screen_name = fmt::format("user{}", i);
    u.group = group_pick.sample(s);
    u.favourite_topic = s.below(3);
    u.mood = std::clamp(kGroups[u.group].mood_shift + 0.3 * s.normal(), -0.9, 0.9);
    u.followers = static_cast<std::int64_t>(std::floor(std::exp(4.5 + 1.8 * s.normal())));
    members[u.group].push_back(i);
  }
  // Activity rank is a shuffled order so ids carry no information.
  std::vector<std::size_t> rank(opt.users);
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  for (std::size_t i = rank.size(); i > 1; --i) std::swap(rank[i - 1], rank[s.below(i)]);
  for (std::size_t i = 0; i < opt.users; ++i) activity[rank[i]] = 1.0 / (static_cast<double>(i) + 10.0);
  const Cumulative user_pick(activity);

  std::array<Cumulative, 5> tweet_days{day_weights(Group::Black, opt.tweet_range),
                                       day_weights(Group::Asian, opt.tweet_range),
                                       day_weights(Group::LGBTQ, opt.tweet_range),
                                       day_weights(Group::Hispanic, opt.tweet_range),
                                       day_weights(Group::Jewish, opt.tweet_range)};

  auto tweets_out = open_output(dir / "tweets.jsonl");
  auto assign_out = open_output(dir / "assignments.jsonl");
  for (std::size_t n = 0; n < opt.tweets; ++n) {
    const User& u = users[user_pick.sample(s)];
    const bool keyword = s.chance(0.85);
    const std::size_t gi = s.chance(0.85) ? u.group : group_pick.sample(s);
    const auto& vocab = kGroups[gi];

    ingest::TweetRecord t;
    t.tweet_id = std::to_string(1250000000000000000LL + static_cast<long long>(n));
    const Date day = opt.tweet_range.first + static_cast<std::int32_t>(tweet_days[gi].sample(s));
    t.created_at = static_cast<Timestamp>(day.days()) * 86400 + static_cast<Timestamp>(s.below(86400));
    t.user_id = u.id;
    t.screen_name = u.screen_name;
    t.follower_count = u.followers + static_cast<std::int64_t>(s.below(5));
    const double lang = s.uniform();
    if (lang < 0.85) t.lang = "en";
    else if (lang < 0.95) t.lang = "es";

    std::vector<std::string> words;
    const auto filler = [&](std::size_t k) {
      for (std::size_t i = 0; i < k; ++i) words.emplace_back(s.pick(kFiller));
    };
    filler(1 + s.below(3));
    if (keyword) {
      std::string phrase = s.pick(vocab.keywords);
      if (s.chance(0.1)) std::replace(phrase.begin(), phrase.end(), ' ', '-');
      if (s.chance(0.05)) phrase += "s";
      if (s.chance(0.2)) phrase[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(phrase[0])));
      words.push_back(std::move(phrase));
    }
    filler(s.below(3));
    const double p_negative = std::clamp(0.5 - 0.6 * u.mood, 0.05, 0.95);
    for (std::size_t k = 1 + s.below(3); k > 0; --k) {
      if (s.chance(0.15)) words.emplace_back(s.pick(kBoosters).token);
      if (s.chance(0.08)) words.emplace_back(s.pick(kNegators));
      words.emplace_back(s.chance(p_negative) ? s.pick(kNegative).token : s.pick(kPositive).token);
      filler(s.below(2));
    }
    if (s.chance(0.03)) words.emplace_back("\xef\xbc\xa2\xef\xbc\xac\xef\xbc\xad");  // full-width "BLM"
    if (s.chance(0.05)) words.emplace_back("caf\xc3\xa9");
    if (s.chance(0.4)) t.hashtags.emplace_back(s.pick(vocab.hashtags));
    if (s.chance(0.1)) t.hashtags.emplace_back(s.chance(0.5) ? "California" : "News");
    const auto& pool = members[gi].empty() ? members[u.group] : members[gi];
    if (s.chance(0.25)) {
      for (std::size_t k = 1 + s.below(2); k > 0; --k) {
        t.mentions.push_back(users[pool[s.below(pool.size())]].id);
      }
    }
    if (s.chance(0.1)) t.in_reply_to_user_id = users[pool[s.below(pool.size())]].id;

    for (const auto& m : t.mentions) t.text += "@user" + std::to_string(std::stoul(m) - 100000) + " ";
    for (std::size_t i = 0; i < words.size(); ++i) t.text += (i ? " " : "") + words[i];
    if (s.chance(0.3)) t.text += s.chance(0.5) ? "!" : "...";
    for (const auto& h : t.hashtags) t.text += " #" + h;
    tweets_out << ingest::to_json(t).dump() << '\n';
    ++summary.tweets;
    if (keyword) ++summary.keyword_tweets;

    // Topic distribution: a dominant topic, then smaller masses elsewhere.
    std::vector<std::pair<topics::TopicId, double>> probs;
    if (keyword) {
      const std::size_t main = s.chance(0.7) ? u.favourite_topic : s.below(3);
      probs.emplace_back(group_topic(gi, main), s.uniform(0.4, 0.85));
      if (s.chance(0.5)) probs.emplace_back(group_topic(gi, (main + 1 + s.below(2)) % 3), s.uniform(0.02, 0.2));
      if (s.chance(0.3)) {
        const std::size_t other = (gi + 1 + s.below(4)) % 5;
        probs.emplace_back(group_topic(other, s.below(3)), s.uniform(0.005, 0.05));
      }
      if (s.chance(0.2)) probs.emplace_back(kSharedTopic, s.uniform(0.01, 0.1));
    } else {
      probs.emplace_back(kFirstChatterTopic + static_cast<topics::TopicId>(s.below(kChatterTopics)),
                         s.uniform(0.3, 0.8));
      if (s.chance(0.1)) probs.emplace_back(group_topic(gi, s.below(3)), s.uniform(0.005, 0.03));
    }
    probs.emplace_back(kFirstChatterTopic + static_cast<topics::TopicId>(s.below(kChatterTopics)) + 10,
                       s.uniform(0.0, 0.05));
    double total = 0.0;
    for (const auto& [id, p] : probs) total += p;
    const double scale = total > 0.95 ? 0.95 / total : 1.0;
    double misc = (1.0 - total * scale) * s.uniform(0.0, 0.8);
    nlohmann::json topics_json = nlohmann::json::array();
    std::sort(probs.begin(), probs.end());
    std::vector<std::pair<topics::TopicId, double>> merged;
    for (const auto& [id, p] : probs) {
      if (!merged.empty() && merged.back().first == id) merged.back().second += p * scale;
      else merged.emplace_back(id, p * scale);
    }
    misc = round4(misc);
    if (misc > 0.0) topics_json.push_back({{"id", kMiscTopic}, {"p", misc}});
    for (const auto& [id, p] : merged) topics_json.push_back({{"id", id}, {"p", round4(p)}});
    assign_out << nlohmann::json{{"tweet_id", t.tweet_id}, {"topics", topics_json}}.dump() << '\n';
  }
  summary.users = opt.users;

  // Crimes follow the same per-group spikes over the longer crime window, with
  // a few incidents before it to exercise date filtering.
  {
    std::vector<double> shares;
    for (const auto& g : kGroups) shares.push_back(g.crime_share);
    shares.push_back(0.15);  // biases outside the five groups
    const Cumulative crime_group(shares);
    std::array<Cumulative, 5> crime_days{day_weights(Group::Black, opt.crime_range),
                                         day_weights(Group::Asian, opt.crime_range),
                                         day_weights(Group::LGBTQ, opt.crime_range),
                                         day_weights(Group::Hispanic, opt.crime_range),
                                         day_weights(Group::Jewish, opt.crime_range)};
    constexpr std::array<ingest::Bias, 4> kLgbtq{ingest::Bias::AntiGayMale, ingest::Bias::AntiLesbian,
                                                 ingest::Bias::AntiLGBT, ingest::Bias::AntiTransgender};
    constexpr std::array<ingest::Bias, 4> kOther{ingest::Bias::AntiWhite, ingest::Bias::AntiArab,
                                                 ingest::Bias::AntiMuslim, ingest::Bias::Other};
    constexpr std::array<const char*, 5> kOffenses{"assault", "vandalism", "intimidation",
                                                   "robbery", "harassment"};
    constexpr std::array<const char*, 6> kLocations{"street", "residence", "school",
                                                    "park", "business", "place of worship"};
    std::vector<ingest::CrimeRecord> crimes;
    for (std::size_t n = 0; n < opt.crimes; ++n) {
      ingest::CrimeRecord c;
      c.incident_id = fmt::format("HC-{:06}", n + 1);
      const std::size_t g = crime_group.sample(s);
      if (g < 5) {
        const Group group = kGroups[g].group;
        c.bias = group == Group::Black      ? ingest::Bias::AntiBlack
                 : group == Group::Asian    ? ingest::Bias::AntiAsian
                 : group == Group::Hispanic ? ingest::Bias::AntiHispanic
                 : group == Group::Jewish   ? ingest::Bias::AntiJewish
                                            : s.pick(kLgbtq);
        c.date = opt.crime_range.first + static_cast<std::int32_t>(crime_days[g].sample(s));
      } else {
        c.bias = s.pick(kOther);
        c.date = opt.crime_range.first + static_cast<std::int32_t>(s.below(static_cast<std::size_t>(opt.crime_range.length())));
      }
      if (s.chance(0.02)) c.date = opt.crime_range.first + -static_cast<std::int32_t>(1 + s.below(300));
      c.offense = s.pick(kOffenses);
      c.location_type = s.pick(kLocations);
      crimes.push_back(std::move(c));
    }
    auto out = open_output(dir / "crimes.csv");
    ingest::write_crimes(out, crimes);
    summary.crimes = crimes.size();
  }

  {
    auto out = open_output(dir / "keywords.csv");
    ingest::KeywordList list;
    for (const auto& g : kGroups) {
      for (const char* k : g.keywords) list.add(k, g.group);
    }
    ingest::write_keywords(out, list);
  }

  {
    topics::TopicGroupMap map;
    map.add(kMiscTopic, "miscellaneous", {});
    for (std::size_t gi = 0; gi < kGroups.size(); ++gi) {
      GroupSet gs;
      gs.insert(kGroups[gi].group);
      for (std::size_t k = 0; k < 3; ++k) map.add(group_topic(gi, k), kGroups[gi].topics[k], gs);
    }
    GroupSet shared;
    shared.insert(Group::Black);
    shared.insert(Group::Asian);
    map.add(kSharedTopic, "hate_crime_reports", shared);
    for (int k = 0; k < kChatterTopics; ++k) {
      map.add(kFirstChatterTopic + k, fmt::format("chatter_{}", k), {});
      map.add(kFirstChatterTopic + 10 + k, fmt::format("background_{}", k), {});
    }
    auto out = open_output(dir / "group_map.csv");
    topics::write_group_map(out, map);
    summary.topics = map.size();
  }

  {
    auto out = open_output(dir / "lexicon.tsv");
    write_lexicon(out);
  }
  {
    auto out = open_output(dir / "modifiers.tsv");
    write_modifiers(out);
  }
  {
    auto out = open_output(dir / "config.toml");
    out << fmt::format(
        "# Synthetic corpus generated with seed {0}.\n"
        "seed = {0}\n\n"
        "[paths]\n"
        "tweets = \"tweets.jsonl\"\n"
        "crimes = \"crimes.csv\"\n"
        "keywords = \"keywords.csv\"\n"
        "lexicon = \"lexicon.tsv\"\n"
        "modifiers = \"modifiers.tsv\"\n"
        "assignments = \"assignments.jsonl\"\n"
        "group_map = \"group_map.csv\"\n"
        "output_dir = \"out\"\n\n"
        "[ingest]\n"
        "crime_start = \"{1}\"\n"
        "crime_end = \"{2}\"\n\n"
        "[timeseries]\n"
        "start = \"{3}\"\n"
        "end = \"{4}\"\n",
        opt.seed, opt.crime_range.first.to_string(), opt.crime_range.last.to_string(),
        opt.tweet_range.first.to_string(), opt.tweet_range.last.to_string());
  }
  return summary;
}

}  // namespace hatewatch::synth
