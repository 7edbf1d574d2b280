#include <random>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "hatewatch/kg.hpp"

using namespace hatewatch;
using namespace hatewatch::kg;
using ingest::Bias;
using ingest::CrimeRecord;
using ingest::TweetRecord;
using topics::TopicGroupMap;

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

void expect_counts(const fixture::KgCase& c) { EXPECT_EQ(fixture::count_mismatch(c.graph, c.expected), ""); }

void expect_conforms(const KnowledgeGraph& kg) { EXPECT_EQ(fixture::ontology_violations(kg), 0u); }

KnowledgeGraph fixture_one() { return fixture::kg_one().graph; }
KnowledgeGraph fixture_two() { return fixture::kg_two().graph; }
KnowledgeGraph fixture_three() { return fixture::kg_three().graph; }

}  // namespace

TEST(Build, HandCountedFixtureOne) {
  const auto c = fixture::kg_one();
  expect_counts(c);
  const auto& kg = c.graph;
  expect_conforms(kg);
  const auto t1 = kg.find(EntityKind::Tweet, "t1");
  ASSERT_TRUE(t1);
  EXPECT_EQ(std::get<double>(kg.entity(*t1).attrs.at("sentiment")), 0.4);
  EXPECT_EQ(std::get<std::string>(kg.entity(*t1).attrs.at("created_at")), "2020-06-01T10:00:00Z");
  EXPECT_TRUE(kg.find(EntityKind::Hashtag, "blm"));
  // in_topic carries the topic probability.
  const auto t2 = *kg.find(EntityKind::Tweet, "t2");
  double sum = 0.0;
  for (auto ti : kg.out_triples(t2)) {
    if (kg.triples()[ti].relation == Relation::InTopic) sum += kg.triples()[ti].weight;
  }
  EXPECT_DOUBLE_EQ(sum, 0.8);
}

TEST(Build, HandCountedFixtureTwo) {
  const auto c = fixture::kg_two();
  expect_counts(c);
  const auto& kg = c.graph;
  expect_conforms(kg);
  EXPECT_FALSE(kg.find(EntityKind::Tweet, "c"));
  EXPECT_TRUE(kg.find(EntityKind::Tweet, "e"));
  EXPECT_FALSE(kg.find(EntityKind::Topic, "11"));
  EXPECT_FALSE(kg.find(EntityKind::User, "u4"));
  EXPECT_FALSE(kg.find(EntityKind::Crime, "x"));
}

TEST(Build, HandCountedFixtureThree) {
  const auto c = fixture::kg_three();
  expect_counts(c);
  const auto& kg = c.graph;
  expect_conforms(kg);
  const auto u1 = *kg.find(EntityKind::User, "u1");
  EXPECT_EQ(std::get<std::int64_t>(kg.entity(u1).attrs.at("follower_count")), 25);
  const auto u9 = *kg.find(EntityKind::User, "u9");
  EXPECT_EQ(std::get<std::int64_t>(kg.entity(u9).attrs.at("follower_count")), 3);
  EXPECT_TRUE(kg.find(EntityKind::Hashtag, "stopaapihate"));
}

TEST(Build, DuplicateIdsAreStructuralErrors) {
  TopicGroupMap map;
  map.add(1, "x", groups({Group::Black}));
  const std::vector<TweetRecord> tw{tweet("t", "u", "2020-06-01"), tweet("t", "v", "2020-06-02")};
  EXPECT_THROW(build(tw, {}, {topics::make_assignment("t", {{1, 0.9}})}, map), StructuralError);
  const std::vector<CrimeRecord> cr{crime("c", "2020-06-01", Bias::AntiBlack),
                                    crime("c", "2020-06-02", Bias::AntiBlack)};
  EXPECT_THROW(build({}, cr, {}, map), StructuralError);
}

TEST(Builder, RejectsOntologyViolations) {
  GraphBuilder b;
  const auto u = b.add_entity(EntityKind::User, "u");
  const auto v = b.add_entity(EntityKind::User, "v");
  const auto t = b.add_entity(EntityKind::Tweet, "t");
  EXPECT_THROW(b.add_triple(u, v, Relation::Tweeted), StructuralError);
  EXPECT_THROW(b.add_triple(t, u, Relation::Tweeted), StructuralError);
  EXPECT_THROW(b.add_triple(u, 99, Relation::Tweeted), StructuralError);
  EXPECT_THROW(b.add_triple(u, t, Relation::Tweeted, 1.5), ValidationError);
  EXPECT_THROW(b.add_triple(EntityKind::User, "nobody", Relation::Tweeted, EntityKind::Tweet, "t"),
               StructuralError);
  EXPECT_NO_THROW(b.add_triple(u, t, Relation::Tweeted));
  EXPECT_EQ(b.add_entity(EntityKind::User, "u"), u);
}

// Every relation accepts exactly its own signature.
TEST(Builder, SignatureIsExclusive) {
  for (std::size_t r = 0; r < kRelationCount; ++r) {
    const auto rel = static_cast<Relation>(r);
    for (std::size_t h = 0; h < kEntityKindCount; ++h) {
      for (std::size_t t = 0; t < kEntityKindCount; ++t) {
        GraphBuilder b;
        const auto hi = b.add_entity(static_cast<EntityKind>(h), "h");
        const auto ti = b.add_entity(static_cast<EntityKind>(t), "t");
        const bool ok = signature(rel).head == static_cast<EntityKind>(h) &&
                        signature(rel).tail == static_cast<EntityKind>(t);
        if (ok) EXPECT_NO_THROW(b.add_triple(hi, ti, rel));
        else EXPECT_THROW(b.add_triple(hi, ti, rel), StructuralError);
      }
    }
  }
}

// Count invariants on random corpora: one tweeted and one tweeted_on per
// tweet, one occurred_on and one victimized per crime.
TEST(Build, CountInvariantsOnRandomCorpora) {
  std::mt19937_64 rng(3);
  TopicGroupMap map;
  map.add(1, "a", groups({Group::Black}));
  map.add(2, "b", groups({Group::Asian, Group::Jewish}));
  map.add(3, "c", {});
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TweetRecord> tw;
    std::vector<topics::TopicAssignment> as;
    for (int i = 0; i < 200; ++i) {
      const auto id = "t" + std::to_string(i);
      const auto day = 1 + rng() % 28;
      tw.push_back(tweet(id, "u" + std::to_string(rng() % 30),
                         fmt::format("2020-05-{:02}T12:00:00Z", day), {"#h" + std::to_string(rng() % 5)},
                         {"u" + std::to_string(rng() % 40)}));
      const double p = static_cast<double>(rng() % 1000) / 1000.0;
      as.push_back(topics::make_assignment(id, {{static_cast<topics::TopicId>(1 + rng() % 3), p}}));
    }
    std::vector<CrimeRecord> cr;
    for (int i = 0; i < 50; ++i) {
      cr.push_back(crime("c" + std::to_string(i), "2020-05-10", static_cast<Bias>(rng() % 14)));
    }
    const auto kg = build(tw, cr, as, map);
    expect_conforms(kg);
    EXPECT_EQ(kg.count(Relation::Tweeted), kg.count(EntityKind::Tweet));
    EXPECT_EQ(kg.count(Relation::TweetedOn), kg.count(EntityKind::Tweet));
    EXPECT_EQ(kg.count(Relation::HasHashtag), kg.count(EntityKind::Tweet));
    EXPECT_EQ(kg.count(Relation::Mentioned), kg.count(EntityKind::Tweet));
    EXPECT_GE(kg.count(Relation::InTopic), kg.count(EntityKind::Tweet));
    EXPECT_EQ(kg.count(Relation::OccurredOn), kg.count(EntityKind::Crime));
    EXPECT_EQ(kg.count(Relation::Victimized), kg.count(EntityKind::Crime));
    EXPECT_EQ(kg.count(Relation::AssociatedWith), 3u);
    EXPECT_EQ(kg.count(EntityKind::Group), 5u);
  }
}

TEST(Subgraph, KeepsGroupTweetsUsersAndTopics) {
  const auto kg = fixture_one();
  const auto sub = extract_group_subgraph(kg, Group::Black);
  EXPECT_EQ(sub.count(EntityKind::Topic), 2u);
  EXPECT_EQ(sub.count(EntityKind::Tweet), 3u);
  EXPECT_EQ(sub.count(EntityKind::User), 2u);
  EXPECT_EQ(sub.entities().size(), 7u);
  EXPECT_EQ(sub.count(Relation::Tweeted), 3u);
  EXPECT_EQ(sub.count(Relation::InTopic), 4u);
  EXPECT_EQ(sub.count(Relation::Mentioned), 1u);
  EXPECT_EQ(sub.count(Relation::RepliedTo), 1u);
  EXPECT_EQ(sub.triples().size(), 9u);
}

TEST(Subgraph, MultiGroupTopicAndEmptyGroup) {
  const auto kg = fixture_two();
  const auto asian = extract_group_subgraph(kg, Group::Asian);
  EXPECT_EQ(asian.entities().size(), 3u);
  EXPECT_EQ(asian.triples().size(), 2u);
  std::vector<std::string> warnings;
  const auto jewish = extract_group_subgraph(kg, Group::Jewish, &warnings);
  EXPECT_TRUE(jewish.entities().empty());
  ASSERT_EQ(warnings.size(), 1u);
}

TEST(Export, EmptyGraphIsHeaderOnly) {
  std::ostringstream out;
  export_graph(KnowledgeGraph{}, ExportFormat::EdgeListCsv, out);
  EXPECT_EQ(out.str(), "head_kind,head_id,relation,tail_kind,tail_id,weight\n");
}

TEST(Export, SingleTriple) {
  GraphBuilder b;
  b.add_triple(b.add_entity(EntityKind::User, "u,1"), b.add_entity(EntityKind::Tweet, "t"),
               Relation::Tweeted, 0.25);
  const auto kg = std::move(b).finish();
  std::ostringstream out;
  export_graph(kg, ExportFormat::EdgeListCsv, out);
  EXPECT_EQ(out.str(),
            "head_kind,head_id,relation,tail_kind,tail_id,weight\nUser,\"u,1\",tweeted,Tweet,t,0.25\n");
}

TEST(Export, EdgeListRoundTripIsLossless) {
  for (const auto& kg : {fixture_one(), fixture_two(), fixture_three()}) {
    std::stringstream edges;
    std::stringstream entities;
    export_graph(kg, ExportFormat::EdgeListCsv, edges);
    write_entities(kg, entities);
    const auto back = import_graph(edges, entities);
    EXPECT_TRUE(back == kg);

    std::stringstream again;
    export_graph(back, ExportFormat::EdgeListCsv, again);
    std::stringstream first;
    export_graph(kg, ExportFormat::EdgeListCsv, first);
    EXPECT_EQ(again.str(), first.str());
  }
}

TEST(Export, EdgeListOnlyImportCreatesBareEntities) {
  const auto kg = fixture_one();
  std::stringstream edges;
  export_graph(kg, ExportFormat::EdgeListCsv, edges);
  const auto back = import_edge_list(edges);
  EXPECT_EQ(back.triples().size(), kg.triples().size());
  // Groups with no triples are not recoverable from edges alone.
  EXPECT_EQ(back.count(EntityKind::Group), 1u);
}

TEST(Export, ImportRejectsUnknownEndpoint) {
  std::istringstream edges("head_kind,head_id,relation,tail_kind,tail_id,weight\nUser,u,tweeted,Tweet,t,1\n");
  std::istringstream entities("kind,entity_id,attribute,type,value\nUser,u,,,\n");
  EXPECT_THROW(import_graph(edges, entities), StructuralError);
  std::istringstream bad("head_kind,head_id,relation,tail_kind,tail_id,weight\nUser,u,likes,Tweet,t,1\n");
  EXPECT_THROW(import_edge_list(bad), ValidationError);
}

TEST(Export, DotAndGraphml) {
  const auto kg = fixture_three();
  std::ostringstream dot;
  export_graph(kg, ExportFormat::Dot, dot);
  EXPECT_NE(dot.str().find("\"User:u1\" -> \"Tweet:f1\" [relation=\"tweeted\", weight=1];"),
            std::string::npos);
  std::ostringstream gml;
  export_graph(kg, ExportFormat::GraphML, gml);
  EXPECT_NE(gml.str().find("<edge source=\"Tweet:f1\" target=\"Topic:20\"><data key=\"relation\">"
                           "in_topic</data><data key=\"weight\">0.5</data></edge>"),
            std::string::npos);
  EXPECT_EQ(parse_export_format("graphml"), ExportFormat::GraphML);
  EXPECT_THROW(parse_export_format("gexf"), ValidationError);
}

TEST(Statistics, CountsPerKindAndRelation) {
  std::ostringstream out;
  write_statistics(fixture_one(), out);
  const auto s = out.str();
  EXPECT_NE(s.find("entity,Tweet,3\n"), std::string::npos);
  EXPECT_NE(s.find("entity,Total,16\n"), std::string::npos);
  EXPECT_NE(s.find("relation,in_topic,4\n"), std::string::npos);
  EXPECT_NE(s.find("relation,Total,17\n"), std::string::npos);
}
