#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hatewatch/common.hpp"
#include "hatewatch/ingest.hpp"
#include "hatewatch/topics.hpp"

namespace hatewatch::kg {

enum class EntityKind : std::uint8_t { Tweet, User, Hashtag, Crime, Date, Topic, Group };
inline constexpr std::size_t kEntityKindCount = 7;

enum class Relation : std::uint8_t {
  Tweeted,
  Mentioned,
  RepliedTo,
  InTopic,
  HasHashtag,
  TweetedOn,
  OccurredOn,
  Victimized,
  AssociatedWith,
};
inline constexpr std::size_t kRelationCount = 9;

std::string_view to_string(EntityKind k) noexcept;
std::string_view to_string(Relation r) noexcept;
std::optional<EntityKind> parse_entity_kind(std::string_view s) noexcept;
std::optional<Relation> parse_relation(std::string_view s) noexcept;

// The (head kind, tail kind) every triple of a relation must have.
struct Signature {
  EntityKind head;
  EntityKind tail;
};
Signature signature(Relation r) noexcept;

using AttrValue = std::variant<std::int64_t, double, std::string>;
using Attributes = std::map<std::string, AttrValue, std::less<>>;

struct Entity {
  EntityKind kind;
  std::string id;
  Attributes attrs;
  bool operator==(const Entity&) const = default;
};

using EntityIndex = std::uint32_t;
using TripleIndex = std::uint32_t;

struct Triple {
  EntityIndex head;
  EntityIndex tail;
  Relation relation;
  double weight;
  bool operator==(const Triple&) const = default;
};

// Immutable after construction; safe for concurrent readers.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  const std::vector<Entity>& entities() const noexcept { return entities_; }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  const Entity& entity(EntityIndex i) const { return entities_.at(i); }

  std::optional<EntityIndex> find(EntityKind kind, std::string_view id) const;

  std::span<const EntityIndex> entities_of(EntityKind kind) const noexcept {
    return by_kind_[static_cast<std::size_t>(kind)];
  }
  std::span<const TripleIndex> triples_of(Relation r) const noexcept {
    return by_relation_[static_cast<std::size_t>(r)];
  }
  std::span<const TripleIndex> out_triples(EntityIndex i) const { return out_.at(i); }
  std::span<const TripleIndex> in_triples(EntityIndex i) const { return in_.at(i); }

  std::size_t count(EntityKind kind) const noexcept { return entities_of(kind).size(); }
  std::size_t count(Relation r) const noexcept { return triples_of(r).size(); }

  bool operator==(const KnowledgeGraph& o) const {
    return entities_ == o.entities_ && triples_ == o.triples_;
  }

 private:
  friend class GraphBuilder;

  std::vector<Entity> entities_;
  std::vector<Triple> triples_;
  std::array<std::unordered_map<std::string, EntityIndex>, kEntityKindCount> ids_;
  std::array<std::vector<EntityIndex>, kEntityKindCount> by_kind_;
  std::array<std::vector<TripleIndex>, kRelationCount> by_relation_;
  std::vector<std::vector<TripleIndex>> out_;
  std::vector<std::vector<TripleIndex>> in_;
};

// Single-writer construction with ontology checks at insertion time.
class GraphBuilder {
 public:
  // Returns the existing index if (kind, id) is already present; given
  // attributes are added where the entity lacks them.
  EntityIndex add_entity(EntityKind kind, std::string id, Attributes attrs = {});
  void set_attribute(EntityIndex i, std::string key, AttrValue value);
  std::optional<EntityIndex> find(EntityKind kind, std::string_view id) const;

  // Throws StructuralError on an unknown endpoint or an ontology violation,
  // ValidationError when the weight is outside [0, 1].
  TripleIndex add_triple(EntityIndex head, EntityIndex tail, Relation r, double weight = 1.0);
  TripleIndex add_triple(EntityKind head_kind, std::string_view head_id, Relation r,
                         EntityKind tail_kind, std::string_view tail_id, double weight = 1.0);

  KnowledgeGraph finish() &&;

 private:
  KnowledgeGraph g_;
};

struct BuildOptions {
  topics::ThresholdPolicy threshold;
};

// Materializes the graph. A tweet enters only if it has a thresholded topic
// that belongs to some group; crimes enter only if their bias targets a group.
// Throws StructuralError on duplicate tweet or crime ids.
KnowledgeGraph build(const std::vector<ingest::TweetRecord>& tweets,
                     const std::vector<ingest::CrimeRecord>& crimes,
                     const std::vector<topics::TopicAssignment>& assignments,
                     const topics::TopicGroupMap& group_map, const BuildOptions& options = {});

// User, Tweet and Topic entities of one group with their tweeted, in_topic,
// mentioned and replied_to triples. A group with no topics yields an empty
// graph and a warning.
KnowledgeGraph extract_group_subgraph(const KnowledgeGraph& kg, Group group,
                                      std::vector<std::string>* warnings = nullptr);

enum class ExportFormat { EdgeListCsv, Dot, GraphML };
// Accepts "csv", "edgelist", "dot", "graphml". Throws ValidationError otherwise.
ExportFormat parse_export_format(std::string_view name);

// Edge list: `head_kind,head_id,relation,tail_kind,tail_id,weight`.
void export_graph(const KnowledgeGraph& kg, ExportFormat format, std::ostream& out);
// Entity table: `kind,entity_id,attribute,type,value`, one row per attribute
// (a single row with empty attribute columns for entities without any).
void write_entities(const KnowledgeGraph& kg, std::ostream& out);

// Inverse of write_entities + export_graph(EdgeListCsv). Entities come from the
// entity table in file order; an edge endpoint missing from it is a StructuralError.
KnowledgeGraph import_graph(std::istream& edges, std::istream& entities);
// Edge list only; endpoints are created as attribute-less entities on first use.
KnowledgeGraph import_edge_list(std::istream& edges);

// `section,type,count`: one row per entity kind and relation, with totals.
void write_statistics(const KnowledgeGraph& kg, std::ostream& out);

}  // namespace hatewatch::kg
