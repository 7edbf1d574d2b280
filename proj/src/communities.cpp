#include "hatewatch/communities.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "hatewatch/csv.hpp"

namespace hatewatch::communities {

namespace {

using Adjacency = std::vector<std::vector<std::pair<NodeId, double>>>;

// One level of the Louvain hierarchy: a weighted graph whose self-loop entries
// carry the internal weight of the communities merged into each node.
struct Level {
  Adjacency adj;
  std::vector<double> degree;
  double two_m = 0.0;
};

Level level_from(const UndirectedGraph& g) {
  Level l;
  l.adj.resize(g.node_count());
  l.degree.resize(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    l.adj[u] = g.neighbors(u);
    l.degree[u] = g.degree(u);
    l.two_m += l.degree[u];
  }
  return l;
}

void shuffle(std::vector<NodeId>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

// Local moving phase. Returns true if any node changed community.
bool move_nodes(const Level& l, std::vector<NodeId>& community, const LouvainOptions& opt,
                std::mt19937_64& rng) {
  const std::size_t n = l.adj.size();
  std::vector<double> tot(n, 0.0);
  for (NodeId i = 0; i < n; ++i) tot[community[i]] += l.degree[i];

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);

  std::vector<double> link(n, 0.0);
  std::vector<NodeId> touched;
  const double m = l.two_m / 2.0;
  bool any_move = false;

  for (bool moved = true; moved;) {
    moved = false;
    for (NodeId i : order) {
      const NodeId own = community[i];
      touched.clear();
      touched.push_back(own);
      link[own] = 0.0;
      for (const auto& [j, w] : l.adj[i]) {
        if (j == i) continue;
        const NodeId c = community[j];
        if (link[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end()) {
          touched.push_back(c);
        }
        link[c] += w;
      }

      const double ki = l.degree[i];
      tot[own] -= ki;
      const auto gain = [&](NodeId c) { return link[c] - opt.resolution * tot[c] * ki / l.two_m; };

      NodeId best = own;
      double best_gain = gain(own);
      const double stay_gain = best_gain;
      for (NodeId c : touched) {
        const double g = gain(c);
        if (g > best_gain || (g == best_gain && c < best)) {
          best = c;
          best_gain = g;
        }
      }
      // Modularity change of the move is (best_gain - stay_gain) / m.
      if (best != own && (best_gain - stay_gain) / m > opt.min_gain) {
        community[i] = best;
        moved = true;
        any_move = true;
      } else {
        best = own;
      }
      tot[best] += ki;
      for (NodeId c : touched) link[c] = 0.0;
    }
  }
  return any_move;
}

// Renumbers communities 0..k-1 by first appearance; returns k.
std::size_t renumber(std::vector<NodeId>& community) {
  std::vector<NodeId> label(community.size(), static_cast<NodeId>(-1));
  NodeId next = 0;
  for (auto& c : community) {
    if (label[c] == static_cast<NodeId>(-1)) label[c] = next++;
    c = label[c];
  }
  return next;
}

Level aggregate(const Level& l, const std::vector<NodeId>& community, std::size_t k) {
  std::vector<std::map<NodeId, double>> acc(k);
  for (NodeId i = 0; i < l.adj.size(); ++i) {
    for (const auto& [j, w] : l.adj[i]) acc[community[i]][community[j]] += w;
  }
  Level out;
  out.adj.resize(k);
  out.degree.assign(k, 0.0);
  out.two_m = l.two_m;
  for (NodeId c = 0; c < k; ++c) {
    out.adj[c].assign(acc[c].begin(), acc[c].end());
    for (const auto& [d, w] : out.adj[c]) out.degree[c] += w;
  }
  return out;
}

std::string color_for(double sentiment) {
  if (std::isnan(sentiment)) return "#cccccc";
  const double s = std::clamp(sentiment, -1.0, 1.0);
  const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(s))));
  return s >= 0 ? fmt::format("#{:02x}{:02x}ff", fade, fade)
                : fmt::format("#ff{:02x}{:02x}", fade, fade);
}

}  // namespace

void UndirectedGraph::add_edge(NodeId u, NodeId v, double weight) {
  if (u >= adjacency_.size() || v >= adjacency_.size()) {
    throw ValidationError(fmt::format("edge ({}, {}) references a missing node", u, v));
  }
  if (!(weight >= 0.0)) throw ValidationError("edge weight must be non-negative");
  const auto bump = [&](NodeId a, NodeId b, double w) {
    auto& row = adjacency_[a];
    auto it = std::lower_bound(row.begin(), row.end(), b,
                               [](const auto& p, NodeId x) { return p.first < x; });
    if (it != row.end() && it->first == b) {
      it->second += w;
    } else {
      row.insert(it, {b, w});
    }
  };
  if (u == v) {
    bump(u, u, 2.0 * weight);
  } else {
    bump(u, v, weight);
    bump(v, u, weight);
  }
  ++edges_;
  total_weight_ += weight;
}

double UndirectedGraph::degree(NodeId u) const {
  double k = 0.0;
  for (const auto& [v, w] : adjacency_.at(u)) k += w;
  return k;
}

double modularity(const UndirectedGraph& g, const Partition& p, double resolution) {
  if (p.size() != g.node_count()) throw ValidationError("partition does not cover the graph");
  const double two_m = 2.0 * g.total_weight();
  if (two_m == 0.0) return 0.0;
  const std::size_t k = p.empty() ? 0 : *std::max_element(p.begin(), p.end()) + 1;
  std::vector<double> in(k, 0.0);
  std::vector<double> tot(k, 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (const auto& [v, w] : g.neighbors(u)) {
      tot[p[u]] += w;
      if (p[u] == p[v]) in[p[u]] += w;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    q += in[c] / two_m - resolution * (tot[c] / two_m) * (tot[c] / two_m);
  }
  return q;
}

Partition louvain(const UndirectedGraph& g, const LouvainOptions& options) {
  if (g.node_count() == 0) throw ValidationError("louvain needs a non-empty graph");
  if (!(options.resolution > 0.0)) throw ValidationError("louvain resolution must be > 0");
  Partition result(g.node_count());
  std::iota(result.begin(), result.end(), 0);
  if (g.total_weight() == 0.0) return result;

  std::mt19937_64 rng(options.seed);
  Level level = level_from(g);
  for (;;) {
    std::vector<NodeId> community(level.adj.size());
    std::iota(community.begin(), community.end(), 0);
    const bool moved = move_nodes(level, community, options, rng);
    const std::size_t k = renumber(community);
    for (auto& c : result) c = community[c];
    if (!moved || k == level.adj.size()) break;
    level = aggregate(level, community, k);
  }
  renumber(result);
  return result;
}

std::vector<Snapshot> monthly_snapshots(const kg::KnowledgeGraph& subgraph) {
  using kg::EntityKind;
  using kg::Relation;
  std::map<YearMonth, std::vector<kg::EntityIndex>> tweets_by_month;
  for (auto t : subgraph.entities_of(EntityKind::Tweet)) {
    const auto& attrs = subgraph.entity(t).attrs;
    const auto it = attrs.find("created_at");
    if (it == attrs.end() || !std::holds_alternative<std::string>(it->second)) {
      throw StructuralError("tweet " + subgraph.entity(t).id + " has no created_at attribute");
    }
    const auto day = date_of(parse_timestamp(std::get<std::string>(it->second)));
    tweets_by_month[YearMonth::of(day)].push_back(t);
  }

  std::vector<Snapshot> out;
  for (const auto& [month, tweets] : tweets_by_month) {
    std::vector<std::pair<kg::EntityIndex, kg::EntityIndex>> edges;
    for (auto t : tweets) {
      for (auto ti : subgraph.in_triples(t)) {
        const auto& tr = subgraph.triples()[ti];
        if (tr.relation == Relation::Tweeted) edges.emplace_back(tr.head, t);
      }
      for (auto ti : subgraph.out_triples(t)) {
        const auto& tr = subgraph.triples()[ti];
        if (tr.relation == Relation::InTopic || tr.relation == Relation::Mentioned ||
            tr.relation == Relation::RepliedTo) {
          edges.emplace_back(t, tr.tail);
        }
      }
    }
    Snapshot s;
    s.month = month;
    for (const auto& [a, b] : edges) {
      s.entities.push_back(a);
      s.entities.push_back(b);
    }
    for (auto t : tweets) s.entities.push_back(t);
    std::sort(s.entities.begin(), s.entities.end());
    s.entities.erase(std::unique(s.entities.begin(), s.entities.end()), s.entities.end());
    const auto local = [&](kg::EntityIndex e) {
      return static_cast<NodeId>(std::lower_bound(s.entities.begin(), s.entities.end(), e) -
                                 s.entities.begin());
    };
    s.graph = UndirectedGraph(s.entities.size());
    for (const auto& [a, b] : edges) s.graph.add_edge(local(a), local(b), 1.0);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Community> filter_communities(const Snapshot& snapshot,
                                          const kg::KnowledgeGraph& subgraph,
                                          const Partition& partition, std::size_t min_size,
                                          SentimentAveraging averaging) {
  using kg::EntityKind;
  if (min_size < 1) throw ValidationError("minimum community size must be >= 1");
  if (partition.size() != snapshot.entities.size()) {
    throw ValidationError("partition does not cover the snapshot");
  }
  const std::size_t k =
      partition.empty() ? 0 : *std::max_element(partition.begin(), partition.end()) + 1;
  std::vector<std::vector<kg::EntityIndex>> users(k);
  for (std::size_t i = 0; i < partition.size(); ++i) {
    if (subgraph.entity(snapshot.entities[i]).kind == EntityKind::User) {
      users[partition[i]].push_back(snapshot.entities[i]);
    }
  }

  // Sentiments of each user's tweets in this snapshot.
  std::map<kg::EntityIndex, std::vector<double>> user_sentiments;
  for (auto e : snapshot.entities) {
    const auto& ent = subgraph.entity(e);
    if (ent.kind != EntityKind::Tweet) continue;
    const auto s = ent.attrs.find("sentiment");
    if (s == ent.attrs.end() || !std::holds_alternative<double>(s->second)) continue;
    for (auto ti : subgraph.in_triples(e)) {
      const auto& tr = subgraph.triples()[ti];
      if (tr.relation == kg::Relation::Tweeted) {
        user_sentiments[tr.head].push_back(std::get<double>(s->second));
      }
    }
  }

  std::vector<Community> out;
  for (std::size_t c = 0; c < k; ++c) {
    if (users[c].size() < min_size) continue;
    Community com;
    com.month = snapshot.month;
    double sum = 0.0;
    std::size_t n = 0;
    for (auto u : users[c]) {
      com.users.push_back(subgraph.entity(u).id);
      const auto it = user_sentiments.find(u);
      if (it == user_sentiments.end()) continue;
      const double user_sum = std::accumulate(it->second.begin(), it->second.end(), 0.0);
      if (averaging == SentimentAveraging::PerTweet) {
        sum += user_sum;
        n += it->second.size();
      } else {
        sum += user_sum / static_cast<double>(it->second.size());
        ++n;
      }
    }
    com.mean_sentiment = n ? sum / static_cast<double>(n) : std::nan("");
    std::sort(com.users.begin(), com.users.end());
    out.push_back(std::move(com));
  }
  std::sort(out.begin(), out.end(), [](const Community& a, const Community& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.users.front() < b.users.front();
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
  return out;
}

namespace {

std::size_t intersection_size(std::span<const std::string> a, std::span<const std::string> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

double jaccard(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() && b.empty()) throw std::domain_error("jaccard index of two empty sets");
  const std::size_t inter = intersection_size(a, b);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

EvolutionGraph link_snapshots(std::vector<Community> communities, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ValidationError(fmt::format("jaccard threshold {} outside (0, 1]", gamma));
  }
  std::stable_sort(communities.begin(), communities.end(), [](const auto& a, const auto& b) {
    return std::tie(a.month, a.index) < std::tie(b.month, b.index);
  });
  EvolutionGraph g;
  g.nodes = std::move(communities);

  std::map<YearMonth, std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    auto [it, fresh] = spans.try_emplace(g.nodes[i].month, i, i + 1);
    if (!fresh) it->second.second = i + 1;
  }
  for (const auto& [month, span] : spans) {
    const auto next = spans.find(month.next());
    if (next == spans.end()) continue;
    for (std::size_t a = span.first; a < span.second; ++a) {
      for (std::size_t b = next->second.first; b < next->second.second; ++b) {
        const auto& ua = g.nodes[a].users;
        const auto& ub = g.nodes[b].users;
        const std::size_t shared = intersection_size(ua, ub);
        const double j = jaccard(ua, ub);
        if (j >= gamma) g.edges.push_back({a, b, j, shared});
      }
    }
  }
  return g;
}

EvolutionGraph community_evolution(const kg::KnowledgeGraph& kg, Group group,
                                   const EvolutionOptions& options,
                                   std::vector<std::string>* warnings) {
  const auto sub = kg::extract_group_subgraph(kg, group, warnings);
  std::vector<Community> all;
  for (const auto& snap : monthly_snapshots(sub)) {
    LouvainOptions lo = options.louvain;
    lo.seed = options.louvain.seed ^ (static_cast<std::uint64_t>(snap.month.index()) * 0x9E3779B97F4A7C15ULL);
    const auto partition = louvain(snap.graph, lo);
    auto found = filter_communities(snap, sub, partition, options.min_size, options.averaging);
    std::move(found.begin(), found.end(), std::back_inserter(all));
  }
  return link_snapshots(std::move(all), options.gamma);
}

void write_nodes(std::ostream& out, const EvolutionGraph& g) {
  csv::write_row(out, {"month", "community_index", "size", "mean_sentiment"});
  for (const auto& c : g.nodes) {
    csv::write_row(out, {c.month.to_string(), std::to_string(c.index), std::to_string(c.size()),
                         format_double(c.mean_sentiment)});
  }
}

void write_edges(std::ostream& out, const EvolutionGraph& g) {
  csv::write_row(out, {"month", "from_index", "to_index", "jaccard"});
  for (const auto& e : g.edges) {
    csv::write_row(out, {g.nodes[e.from].month.to_string(), std::to_string(g.nodes[e.from].index),
                         std::to_string(g.nodes[e.to].index), format_double(e.jaccard)});
  }
}

void write_dot(std::ostream& out, const EvolutionGraph& g, std::string_view name) {
  const auto id = [&](const Community& c) { return fmt::format("\"{}#{}\"", c.month.to_string(), c.index); };
  out << "digraph \"" << name << "\" {\n  rankdir=LR;\n  node [shape=circle, style=filled];\n";
  std::map<YearMonth, std::vector<const Community*>> by_month;
  for (const auto& c : g.nodes) by_month[c.month].push_back(&c);
  for (const auto& [month, cs] : by_month) {
    out << "  { rank=same;";
    for (const auto* c : cs) out << ' ' << id(*c) << ';';
    out << " }\n";
  }
  for (const auto& c : g.nodes) {
    out << "  " << id(c) << " [label=\"" << c.size() << "\", size=" << c.size()
        << ", mean_sentiment=" << format_double(c.mean_sentiment) << ", fillcolor=\""
        << color_for(c.mean_sentiment)
        << "\", width=" << format_double(0.3 + std::sqrt(static_cast<double>(c.size())) / 10.0)
        << "];\n";
  }
  for (const auto& e : g.edges) {
    out << "  " << id(g.nodes[e.from]) << " -> " << id(g.nodes[e.to])
        << " [jaccard=" << format_double(e.jaccard) << ", shared=" << e.shared_users
        << ", penwidth=" << format_double(1.0 + std::log1p(static_cast<double>(e.shared_users)))
        << "];\n";
  }
  out << "}\n";
}

}  // namespace hatewatch::communities
