#pragma once

// Hand-built inputs shared by the unit tests and the acceptance binary.

#include <array>
#include <string>
#include <vector>

#include "hatewatch/ingest.hpp"
#include "hatewatch/kg.hpp"

namespace fixture {

struct KgCounts {
  // Tweet User Hashtag Crime Date Topic Group.
  std::array<std::size_t, hatewatch::kg::kEntityKindCount> entities;
  // tweeted mentioned replied_to in_topic has_hashtag tweeted_on occurred_on
  // victimized associated_with.
  std::array<std::size_t, hatewatch::kg::kRelationCount> relations;
};

struct KgCase {
  std::string name;
  hatewatch::kg::KnowledgeGraph graph;
  KgCounts expected;
};

// 3 tweets, 2 users, 1 crime, 2 topics, 1 group in use.
KgCase kg_one();
// Unmapped, below-threshold and unassigned tweets; untargeted crimes; a two-group topic.
KgCase kg_two();
// Hashtag normalisation, mention-only users, follower maximum, empty hashtags.
KgCase kg_three();

// Empty string when the counts match, else a description of the first mismatch.
std::string count_mismatch(const hatewatch::kg::KnowledgeGraph& g, const KgCounts& c);
// Number of triples whose endpoints do not have the relation's kinds.
std::size_t ontology_violations(const hatewatch::kg::KnowledgeGraph& g);

// Twenty base phrases over the five groups, and their augmented list written out by hand.
hatewatch::ingest::KeywordList base_keywords();
std::vector<hatewatch::ingest::KeywordEntry> augmented_keywords();

}  // namespace fixture
