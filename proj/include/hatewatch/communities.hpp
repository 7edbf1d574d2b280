#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hatewatch/common.hpp"
#include "hatewatch/kg.hpp"

namespace hatewatch::communities {

using NodeId = std::uint32_t;

// Symmetric weighted adjacency. A self-loop of weight w adds 2w to the
// node's degree, so the sum of degrees is always 2m.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(std::size_t nodes) : adjacency_(nodes) {}

  // Parallel edges accumulate. Throws ValidationError for unknown nodes or a negative weight.
  void add_edge(NodeId u, NodeId v, double weight = 1.0);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }
  // Sum of edge weights (m).
  double total_weight() const noexcept { return total_weight_; }
  double degree(NodeId u) const;
  // (neighbour, A_uv) pairs sorted by neighbour; a self-loop appears as (u, 2w).
  const std::vector<std::pair<NodeId, double>>& neighbors(NodeId u) const {
    return adjacency_.at(u);
  }

 private:
  std::vector<std::vector<std::pair<NodeId, double>>> adjacency_;
  std::size_t edges_ = 0;
  double total_weight_ = 0.0;
};

// community[i] for node i; labels are 0..k-1 in order of first appearance.
using Partition = std::vector<std::uint32_t>;

// Q = (1/2m) sum_ij [A_ij - resolution * k_i k_j / 2m] delta(c_i, c_j); 0 for an edgeless graph.
double modularity(const UndirectedGraph& g, const Partition& p, double resolution = 1.0);

struct LouvainOptions {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  // A node moves only when its modularity gain exceeds this.
  double min_gain = 1e-9;
};

// Multi-level greedy modularity optimisation. Node visiting order is a seeded
// shuffle; equal gains go to the smaller community id. Edgeless graphs return
// singletons. Throws ValidationError for an empty graph or resolution <= 0.
Partition louvain(const UndirectedGraph& g, const LouvainOptions& options = {});

// Graph of one month of a group subgraph: users, that month's tweets and the
// topics they are in. in_topic weights are ignored (every edge weighs 1).
struct Snapshot {
  YearMonth month;
  // Subgraph entity behind each node.
  std::vector<kg::EntityIndex> entities;
  UndirectedGraph graph;
};

// One snapshot per calendar month (UTC) that has tweets, in month order.
// Tweets need a "created_at" attribute.
std::vector<Snapshot> monthly_snapshots(const kg::KnowledgeGraph& subgraph);

enum class SentimentAveraging {
  // Mean over the community users' tweets that month.
  PerTweet,
  // Mean of each user's monthly mean.
  PerUser,
};

struct Community {
  YearMonth month;
  std::size_t index = 0;
  // Sorted user ids.
  std::vector<std::string> users;
  double mean_sentiment = 0.0;
  std::size_t size() const noexcept { return users.size(); }
};

// Communities of a partitioned snapshot whose user count (tweets and topics
// not counted) is at least min_size, ordered by size descending then first
// user id, and indexed in that order. Throws ValidationError for min_size < 1.
std::vector<Community> filter_communities(const Snapshot& snapshot,
                                          const kg::KnowledgeGraph& subgraph,
                                          const Partition& partition, std::size_t min_size,
                                          SentimentAveraging averaging = SentimentAveraging::PerTweet);

// |a ∩ b| / |a ∪ b| over sorted, duplicate-free ranges. Throws std::domain_error if both are empty.
double jaccard(std::span<const std::string> a, std::span<const std::string> b);

struct EvolutionEdge {
  std::size_t from = 0;  // index into EvolutionGraph::nodes
  std::size_t to = 0;
  double jaccard = 0.0;
  std::size_t shared_users = 0;
};

struct EvolutionGraph {
  std::vector<Community> nodes;
  std::vector<EvolutionEdge> edges;
};

// Links every community at month t to every community at month t+1 with
// Jaccard >= gamma. Throws ValidationError unless gamma in (0, 1].
EvolutionGraph link_snapshots(std::vector<Community> communities, double gamma);

struct EvolutionOptions {
  LouvainOptions louvain;
  double gamma = 0.01;
  std::size_t min_size = 1;
  SentimentAveraging averaging = SentimentAveraging::PerTweet;
};

// Extract, snapshot, partition, filter and link for one group.
EvolutionGraph community_evolution(const kg::KnowledgeGraph& kg, Group group,
                                   const EvolutionOptions& options,
                                   std::vector<std::string>* warnings = nullptr);

// `month,community_index,size,mean_sentiment`
void write_nodes(std::ostream& out, const EvolutionGraph& g);
// `month,from_index,to_index,jaccard` (month of the source community)
void write_edges(std::ostream& out, const EvolutionGraph& g);
// Nodes sized by user count and coloured by mean sentiment; edge pen width by shared users.
void write_dot(std::ostream& out, const EvolutionGraph& g, std::string_view name);

}  // namespace hatewatch::communities
