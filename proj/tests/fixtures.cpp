#include "fixtures.hpp"

#include <fmt/format.h>

namespace fixture {

using namespace hatewatch;
using namespace hatewatch::kg;
using ingest::Bias;
using ingest::CrimeRecord;
using ingest::TweetRecord;
using topics::TopicGroupMap;
using G = Group;

namespace {

GroupSet groups(std::initializer_list<Group> gs) {
  GroupSet s;
  for (Group g : gs) s.insert(g);
  return s;
}

TweetRecord tweet(std::string id, std::string user, std::string when,
                  std::vector<std::string> hashtags = {}, std::vector<std::string> mentions = {},
                  std::optional<std::string> reply = {}, std::int64_t followers = 0) {
  TweetRecord t;
  t.tweet_id = std::move(id);
  t.user_id = std::move(user);
  t.created_at = parse_timestamp(when);
  t.hashtags = std::move(hashtags);
  t.mentions = std::move(mentions);
  t.in_reply_to_user_id = std::move(reply);
  t.follower_count = followers;
  return t;
}

CrimeRecord crime(std::string id, std::string date, Bias bias) {
  return {std::move(id), Date::parse(date), bias, "assault", "street"};
}

}  // namespace

KgCase kg_one() {
  TopicGroupMap map;
  map.add(1, "police", groups({Group::Black}));
  map.add(2, "protest", groups({Group::Black}));
  auto t1 = tweet("t1", "u1", "2020-06-01T10:00:00Z", {"#BLM"}, {"u2"});
  t1.sentiment = 0.4;
  const std::vector<TweetRecord> tweets{
      t1,
      tweet("t2", "u1", "2020-06-01T11:00:00Z"),
      tweet("t3", "u2", "2020-06-02T09:00:00Z", {}, {}, "u1"),
  };
  const std::vector<topics::TopicAssignment> as{
      topics::make_assignment("t1", {{1, 0.9}}),
      topics::make_assignment("t2", {{1, 0.5}, {2, 0.3}}),
      topics::make_assignment("t3", {{2, 0.8}}),
  };
  return {"one", build(tweets, {crime("c1", "2020-06-02", Bias::AntiBlack)}, as, map),
          {{3, 2, 1, 1, 2, 2, 5}, {3, 1, 1, 4, 1, 3, 1, 1, 2}}};
}

KgCase kg_two() {
  TopicGroupMap map;
  map.add(10, "shared", groups({Group::Asian, Group::Black}));
  map.add(11, "misc", {});
  map.add(12, "pride", groups({Group::LGBTQ}));
  const std::vector<TweetRecord> tweets{
      tweet("a", "u1", "2020-07-01T01:00:00Z"),
      tweet("b", "u3", "2020-07-01T02:00:00Z", {"#misc"}, {"u4"}),
      tweet("c", "u3", "2020-07-01T03:00:00Z"),
      tweet("d", "u3", "2020-07-01T04:00:00Z"),
      tweet("e", "u2", "2020-07-01T05:00:00Z"),
  };
  const std::vector<topics::TopicAssignment> as{
      topics::make_assignment("a", {{10, 0.6}}),
      topics::make_assignment("b", {{11, 0.9}}),
      topics::make_assignment("c", {{12, 0.005}}),
      topics::make_assignment("e", {{12, 0.01}}),
  };
  const std::vector<CrimeRecord> crimes{
      crime("x", "2020-07-01", Bias::AntiWhite),
      crime("y", "2020-07-01", Bias::AntiAsian),
      crime("z", "2020-07-01", Bias::AntiTransgender),
      crime("w", "2020-07-01", Bias::Other),
  };
  return {"two", build(tweets, crimes, as, map), {{2, 2, 0, 2, 1, 2, 5}, {2, 0, 0, 2, 0, 2, 2, 2, 3}}};
}

KgCase kg_three() {
  TopicGroupMap map;
  map.add(20, "aapi", groups({Group::Asian}));
  const std::vector<TweetRecord> tweets{
      tweet("f1", "u1", "2020-04-01T08:00:00Z", {"#StopAAPIHate"}, {}, {}, 10),
      tweet("f2", "u1", "2020-04-01T09:00:00Z", {"#stop_aapi_hate"}, {"u9"}, {}, 25),
      tweet("f3", "u9", "2020-04-02T09:00:00Z", {"#"}, {}, {}, 3),
  };
  const std::vector<topics::TopicAssignment> as{
      topics::make_assignment("f1", {{20, 0.5}}),
      topics::make_assignment("f2", {{20, 0.5}}),
      topics::make_assignment("f3", {{20, 0.5}}),
  };
  return {"three", build(tweets, {}, as, map), {{3, 2, 1, 0, 2, 1, 5}, {3, 1, 0, 3, 2, 3, 0, 0, 1}}};
}

std::string count_mismatch(const KnowledgeGraph& g, const KgCounts& c) {
  std::size_t total_e = 0;
  std::size_t total_r = 0;
  for (std::size_t k = 0; k < kEntityKindCount; ++k) {
    const auto kind = static_cast<EntityKind>(k);
    if (g.count(kind) != c.entities[k]) {
      return fmt::format("{} entities: {} != {}", to_string(kind), g.count(kind), c.entities[k]);
    }
    total_e += c.entities[k];
  }
  for (std::size_t r = 0; r < kRelationCount; ++r) {
    const auto rel = static_cast<Relation>(r);
    if (g.count(rel) != c.relations[r]) {
      return fmt::format("{} triples: {} != {}", to_string(rel), g.count(rel), c.relations[r]);
    }
    total_r += c.relations[r];
  }
  if (g.entities().size() != total_e) return "entity total";
  if (g.triples().size() != total_r) return "triple total";
  return {};
}

std::size_t ontology_violations(const KnowledgeGraph& g) {
  std::size_t bad = 0;
  for (const auto& t : g.triples()) {
    const auto sig = signature(t.relation);
    if (g.entity(t.head).kind != sig.head || g.entity(t.tail).kind != sig.tail) ++bad;
    if (!(t.weight >= 0.0 && t.weight <= 1.0)) ++bad;
  }
  return bad;
}

ingest::KeywordList base_keywords() {
  return {
{"blm", G::Black},
{"black lives matter", G::Black},
{"george floyd", G::Black},
{"racism", G::Black},
{"police brutality", G::Black},
{"stop asian hate", G::Asian},
{"kung flu", G::Asian},
{"china virus", G::Asian},
{"aapi", G::Asian},
{"illegals", G::Hispanic},
{"build the wall", G::Hispanic},
{"latino", G::Hispanic},
{"antisemitism", G::Jewish},
{"zionist", G::Jewish},
{"jewish", G::Jewish},
{"lgbtq", G::LGBTQ},
{"pride month", G::LGBTQ},
{"transgender", G::LGBTQ},
{"gay", G::LGBTQ},
{"homophobia", G::LGBTQ},
  };
}

std::vector<ingest::KeywordEntry> augmented_keywords() {
  return {
      {"blm", G::Black}, {"blms", G::Black},
      {"black lives matter", G::Black}, {"black lives matters", G::Black}, {"blacklivesmatter", G::Black},
      {"blacklivesmatters", G::Black}, {"black-lives-matter", G::Black}, {"black-lives-matters", G::Black},
      {"george floyd", G::Black}, {"george floyds", G::Black}, {"georgefloyd", G::Black},
      {"georgefloyds", G::Black}, {"george-floyd", G::Black}, {"george-floyds", G::Black},
      {"racism", G::Black}, {"racisms", G::Black},
      {"police brutality", G::Black}, {"police brutalitys", G::Black}, {"policebrutality", G::Black},
      {"policebrutalitys", G::Black}, {"police-brutality", G::Black}, {"police-brutalitys", G::Black},
      {"stop asian hate", G::Asian}, {"stop asian hates", G::Asian}, {"stopasianhate", G::Asian},
      {"stopasianhates", G::Asian}, {"stop-asian-hate", G::Asian}, {"stop-asian-hates", G::Asian},
      {"kung flu", G::Asian}, {"kung flus", G::Asian}, {"kungflu", G::Asian},
      {"kungflus", G::Asian}, {"kung-flu", G::Asian}, {"kung-flus", G::Asian},
      {"china virus", G::Asian}, {"china viruss", G::Asian}, {"chinavirus", G::Asian},
      {"chinaviruss", G::Asian}, {"china-virus", G::Asian}, {"china-viruss", G::Asian},
      {"aapi", G::Asian}, {"aapis", G::Asian},
      {"illegals", G::Hispanic}, {"illegalss", G::Hispanic},
      {"build the wall", G::Hispanic}, {"build the walls", G::Hispanic}, {"buildthewall", G::Hispanic},
      {"buildthewalls", G::Hispanic}, {"build-the-wall", G::Hispanic}, {"build-the-walls", G::Hispanic},
      {"latino", G::Hispanic}, {"latinos", G::Hispanic},
      {"antisemitism", G::Jewish}, {"antisemitisms", G::Jewish},
      {"zionist", G::Jewish}, {"zionists", G::Jewish},
      {"jewish", G::Jewish}, {"jewishs", G::Jewish},
      {"lgbtq", G::LGBTQ}, {"lgbtqs", G::LGBTQ},
      {"pride month", G::LGBTQ}, {"pride months", G::LGBTQ}, {"pridemonth", G::LGBTQ},
      {"pridemonths", G::LGBTQ}, {"pride-month", G::LGBTQ}, {"pride-months", G::LGBTQ},
      {"transgender", G::LGBTQ}, {"transgenders", G::LGBTQ},
      {"gay", G::LGBTQ}, {"gays", G::LGBTQ},
      {"homophobia", G::LGBTQ}, {"homophobias", G::LGBTQ},
  };
}

}  // namespace fixture
