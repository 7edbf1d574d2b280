#include "hatewatch/kg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "hatewatch/csv.hpp"

namespace hatewatch::kg {

namespace {

constexpr std::array<std::string_view, kEntityKindCount> kKindNames{
    "Tweet", "User", "Hashtag", "Crime", "Date", "Topic", "Group"};

constexpr std::array<std::string_view, kRelationCount> kRelationNames{
    "tweeted",     "mentioned",   "replied_to", "in_topic",       "has_hashtag",
    "tweeted_on",  "occurred_on", "victimized", "associated_with"};

constexpr std::array<Signature, kRelationCount> kOntology{{
    {EntityKind::User, EntityKind::Tweet},     // tweeted
    {EntityKind::Tweet, EntityKind::User},     // mentioned
    {EntityKind::Tweet, EntityKind::User},     // replied_to
    {EntityKind::Tweet, EntityKind::Topic},    // in_topic
    {EntityKind::Tweet, EntityKind::Hashtag},  // has_hashtag
    {EntityKind::Tweet, EntityKind::Date},     // tweeted_on
    {EntityKind::Crime, EntityKind::Date},     // occurred_on
    {EntityKind::Crime, EntityKind::Group},    // victimized
    {EntityKind::Topic, EntityKind::Group},    // associated_with
}};

std::size_t idx(EntityKind k) { return static_cast<std::size_t>(k); }
std::size_t idx(Relation r) { return static_cast<std::size_t>(r); }

std::string hashtag_id(std::string_view raw) {
  std::string id;
  for (char c : ingest::clean_text(raw)) {
    if (c != ' ') id.push_back(c);
  }
  return id;
}

double parse_weight(std::string_view s, std::size_t line) {
  double w = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), w);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ValidationError(fmt::format("edge list line {}: bad weight '{}'", line, s));
  }
  return w;
}

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string node_key(const Entity& e) { return fmt::format("{}:{}", to_string(e.kind), e.id); }

const char* type_name(const AttrValue& v) {
  switch (v.index()) {
    case 0: return "int";
    case 1: return "real";
    default: return "text";
  }
}

std::string value_text(const AttrValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else {
          return std::to_string(x);
        }
      },
      v);
}

AttrValue parse_value(std::string_view type, const std::string& text, std::size_t line) {
  if (type == "text") return text;
  if (type == "int") {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc{} && p == text.data() + text.size()) return v;
  } else if (type == "real") {
    if (text == "nan") return std::nan("");
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc{} && p == text.data() + text.size()) return v;
  }
  throw ValidationError(fmt::format("entity table line {}: bad {} value '{}'", line, type, text));
}

}  // namespace

std::string_view to_string(EntityKind k) noexcept { return kKindNames[idx(k)]; }
std::string_view to_string(Relation r) noexcept { return kRelationNames[idx(r)]; }

std::optional<EntityKind> parse_entity_kind(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<EntityKind>(i);
  }
  return std::nullopt;
}

std::optional<Relation> parse_relation(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kRelationNames.size(); ++i) {
    if (kRelationNames[i] == s) return static_cast<Relation>(i);
  }
  return std::nullopt;
}

Signature signature(Relation r) noexcept { return kOntology[idx(r)]; }

std::optional<EntityIndex> KnowledgeGraph::find(EntityKind kind, std::string_view id) const {
  const auto& ids = ids_[idx(kind)];
  const auto it = ids.find(std::string(id));
  if (it == ids.end()) return std::nullopt;
  return it->second;
}

EntityIndex GraphBuilder::add_entity(EntityKind kind, std::string id, Attributes attrs) {
  auto& ids = g_.ids_[idx(kind)];
  if (const auto it = ids.find(id); it != ids.end()) {
    auto& existing = g_.entities_[it->second].attrs;
    for (auto& [k, v] : attrs) existing.try_emplace(k, std::move(v));
    return it->second;
  }
  const auto i = static_cast<EntityIndex>(g_.entities_.size());
  ids.emplace(id, i);
  g_.entities_.push_back({kind, std::move(id), std::move(attrs)});
  return i;
}

void GraphBuilder::set_attribute(EntityIndex i, std::string key, AttrValue value) {
  g_.entities_.at(i).attrs.insert_or_assign(std::move(key), std::move(value));
}

std::optional<EntityIndex> GraphBuilder::find(EntityKind kind, std::string_view id) const {
  return g_.find(kind, id);
}

TripleIndex GraphBuilder::add_triple(EntityIndex head, EntityIndex tail, Relation r,
                                     double weight) {
  if (head >= g_.entities_.size() || tail >= g_.entities_.size()) {
    throw StructuralError(fmt::format("{} triple references a missing entity", to_string(r)));
  }
  const auto sig = signature(r);
  const auto& h = g_.entities_[head];
  const auto& t = g_.entities_[tail];
  if (h.kind != sig.head || t.kind != sig.tail) {
    throw StructuralError(fmt::format("ontology violation: {} {} -> {} {} via {}", to_string(h.kind),
                                      h.id, to_string(t.kind), t.id, to_string(r)));
  }
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw ValidationError(fmt::format("weight {} of {} triple outside [0, 1]", weight, to_string(r)));
  }
  const auto i = static_cast<TripleIndex>(g_.triples_.size());
  g_.triples_.push_back({head, tail, r, weight});
  return i;
}

TripleIndex GraphBuilder::add_triple(EntityKind head_kind, std::string_view head_id, Relation r,
                                     EntityKind tail_kind, std::string_view tail_id,
                                     double weight) {
  const auto h = find(head_kind, head_id);
  const auto t = find(tail_kind, tail_id);
  if (!h || !t) {
    throw StructuralError(fmt::format("{} triple references missing entity {}:{}", to_string(r),
                                      to_string(h ? tail_kind : head_kind), h ? tail_id : head_id));
  }
  return add_triple(*h, *t, r, weight);
}

KnowledgeGraph GraphBuilder::finish() && {
  KnowledgeGraph g = std::move(g_);
  g.out_.assign(g.entities_.size(), {});
  g.in_.assign(g.entities_.size(), {});
  for (EntityIndex i = 0; i < g.entities_.size(); ++i) {
    g.by_kind_[idx(g.entities_[i].kind)].push_back(i);
  }
  for (TripleIndex i = 0; i < g.triples_.size(); ++i) {
    const auto& t = g.triples_[i];
    g.by_relation_[idx(t.relation)].push_back(i);
    g.out_[t.head].push_back(i);
    g.in_[t.tail].push_back(i);
  }
  g_ = KnowledgeGraph{};
  return g;
}

KnowledgeGraph build(const std::vector<ingest::TweetRecord>& tweets,
                     const std::vector<ingest::CrimeRecord>& crimes,
                     const std::vector<topics::TopicAssignment>& assignments,
                     const topics::TopicGroupMap& group_map, const BuildOptions& options) {
  GraphBuilder b;

  for (Group g : kAllGroups) b.add_entity(EntityKind::Group, std::string(to_string(g)));

  std::unordered_set<topics::TopicId> graph_topics;
  for (topics::TopicId t : group_map.topics()) {
    const GroupSet gs = group_map.groups_of(t);
    if (gs.empty()) continue;
    graph_topics.insert(t);
    const auto ti = b.add_entity(EntityKind::Topic, std::to_string(t),
                                 {{"label", group_map.label(t)}});
    for (Group g : kAllGroups) {
      if (gs.contains(g)) {
        b.add_triple(ti, *b.find(EntityKind::Group, to_string(g)), Relation::AssociatedWith);
      }
    }
  }

  std::unordered_map<std::string_view, const topics::TopicAssignment*> by_tweet;
  by_tweet.reserve(assignments.size());
  for (const auto& a : assignments) by_tweet.emplace(a.tweet_id, &a);

  // Thresholded in-graph topics per tweet; tweets without any stay out.
  std::vector<std::vector<topics::TopicId>> tweet_topics(tweets.size());
  std::unordered_map<std::string_view, std::int64_t> followers;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    const auto it = by_tweet.find(tweets[i].tweet_id);
    if (it == by_tweet.end()) continue;
    for (auto t : topics::thresholded_topics(*it->second, options.threshold)) {
      if (graph_topics.contains(t)) tweet_topics[i].push_back(t);
    }
    if (tweet_topics[i].empty()) continue;
    auto& f = followers[tweets[i].user_id];
    f = std::max(f, tweets[i].follower_count);
  }

  for (std::size_t i = 0; i < tweets.size(); ++i) {
    if (tweet_topics[i].empty()) continue;
    const auto& tw = tweets[i];
    if (b.find(EntityKind::Tweet, tw.tweet_id)) {
      throw StructuralError("duplicate tweet id " + tw.tweet_id);
    }
    Attributes attrs{{"created_at", format_timestamp(tw.created_at)}};
    if (tw.sentiment) attrs.emplace("sentiment", *tw.sentiment);
    const auto ti = b.add_entity(EntityKind::Tweet, tw.tweet_id, std::move(attrs));
    const auto ui = b.add_entity(EntityKind::User, tw.user_id);
    b.set_attribute(ui, "follower_count", followers.at(tw.user_id));
    b.add_triple(ui, ti, Relation::Tweeted);

    const auto di = b.add_entity(EntityKind::Date, date_of(tw.created_at).to_string());
    b.add_triple(ti, di, Relation::TweetedOn);

    const auto& a = *by_tweet.at(tw.tweet_id);
    for (auto t : tweet_topics[i]) {
      b.add_triple(ti, *b.find(EntityKind::Topic, std::to_string(t)), Relation::InTopic,
                   a.probability(t));
    }
    for (const auto& h : tw.hashtags) {
      auto id = hashtag_id(h);
      if (id.empty()) continue;
      b.add_triple(ti, b.add_entity(EntityKind::Hashtag, std::move(id)), Relation::HasHashtag);
    }
    for (const auto& m : tw.mentions) {
      b.add_triple(ti, b.add_entity(EntityKind::User, m), Relation::Mentioned);
    }
    if (tw.in_reply_to_user_id) {
      b.add_triple(ti, b.add_entity(EntityKind::User, *tw.in_reply_to_user_id),
                   Relation::RepliedTo);
    }
  }

  for (const auto& c : crimes) {
    const auto group = ingest::target_group(c.bias);
    if (!group) continue;
    if (b.find(EntityKind::Crime, c.incident_id)) {
      throw StructuralError("duplicate crime id " + c.incident_id);
    }
    const auto ci = b.add_entity(EntityKind::Crime, c.incident_id,
                                 {{"bias", std::string(ingest::to_string(c.bias))},
                                  {"offense", c.offense},
                                  {"location_type", c.location_type}});
    b.add_triple(ci, b.add_entity(EntityKind::Date, c.date.to_string()), Relation::OccurredOn);
    b.add_triple(ci, *b.find(EntityKind::Group, to_string(*group)), Relation::Victimized);
  }

  return std::move(b).finish();
}

KnowledgeGraph extract_group_subgraph(const KnowledgeGraph& kg, Group group,
                                      std::vector<std::string>* warnings) {
  GraphBuilder b;
  const auto gi = kg.find(EntityKind::Group, to_string(group));
  std::vector<EntityIndex> group_topics;
  if (gi) {
    for (auto t : kg.in_triples(*gi)) {
      const auto& tr = kg.triples()[t];
      if (tr.relation == Relation::AssociatedWith) group_topics.push_back(tr.head);
    }
  }
  std::sort(group_topics.begin(), group_topics.end());
  if (group_topics.empty()) {
    if (warnings) warnings->push_back(fmt::format("group {} has no topics", to_string(group)));
    return std::move(b).finish();
  }

  std::vector<char> is_topic(kg.entities().size(), 0);
  std::vector<char> is_tweet(kg.entities().size(), 0);
  std::vector<char> is_user(kg.entities().size(), 0);
  for (auto t : group_topics) is_topic[t] = 1;
  for (auto t : group_topics) {
    for (auto ti : kg.in_triples(t)) {
      const auto& tr = kg.triples()[ti];
      if (tr.relation == Relation::InTopic) is_tweet[tr.head] = 1;
    }
  }
  for (auto ti : kg.triples_of(Relation::Tweeted)) {
    const auto& tr = kg.triples()[ti];
    if (is_tweet[tr.tail]) is_user[tr.head] = 1;
  }

  // Keep the source graph's entity order so the result is deterministic.
  std::vector<EntityIndex> remap(kg.entities().size(), 0);
  for (EntityIndex i = 0; i < kg.entities().size(); ++i) {
    if (is_topic[i] || is_tweet[i] || is_user[i]) {
      const auto& e = kg.entity(i);
      remap[i] = b.add_entity(e.kind, e.id, e.attrs);
    }
  }
  for (const auto& tr : kg.triples()) {
    bool keep = false;
    switch (tr.relation) {
      case Relation::Tweeted:
        keep = is_user[tr.head] && is_tweet[tr.tail];
        break;
      case Relation::InTopic:
        keep = is_tweet[tr.head] && is_topic[tr.tail];
        break;
      case Relation::Mentioned:
      case Relation::RepliedTo:
        keep = is_tweet[tr.head] && is_user[tr.tail];
        break;
      default:
        break;
    }
    if (keep) b.add_triple(remap[tr.head], remap[tr.tail], tr.relation, tr.weight);
  }
  return std::move(b).finish();
}

ExportFormat parse_export_format(std::string_view name) {
  if (name == "csv" || name == "edgelist" || name == "edge-list") return ExportFormat::EdgeListCsv;
  if (name == "dot") return ExportFormat::Dot;
  if (name == "graphml") return ExportFormat::GraphML;
  throw ValidationError(fmt::format("unknown export format '{}' (csv, dot, graphml)", name));
}

void export_graph(const KnowledgeGraph& kg, ExportFormat format, std::ostream& out) {
  const auto& es = kg.entities();
  switch (format) {
    case ExportFormat::EdgeListCsv:
      csv::write_row(out, {"head_kind", "head_id", "relation", "tail_kind", "tail_id", "weight"});
      for (const auto& t : kg.triples()) {
        const auto& h = es[t.head];
        const auto& tl = es[t.tail];
        csv::write_row(out, {std::string(to_string(h.kind)), h.id, std::string(to_string(t.relation)),
                             std::string(to_string(tl.kind)), tl.id, format_double(t.weight)});
      }
      break;
    case ExportFormat::Dot:
      out << "digraph kg {\n";
      for (const auto& e : es) {
        out << "  " << dot_quote(node_key(e)) << " [kind=" << dot_quote(to_string(e.kind))
            << ", label=" << dot_quote(e.id) << "];\n";
      }
      for (const auto& t : kg.triples()) {
        out << "  " << dot_quote(node_key(es[t.head])) << " -> " << dot_quote(node_key(es[t.tail]))
            << " [relation=" << dot_quote(to_string(t.relation))
            << ", weight=" << format_double(t.weight) << "];\n";
      }
      out << "}\n";
      break;
    case ExportFormat::GraphML:
      out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
          << "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
          << "  <key id=\"relation\" for=\"edge\" attr.name=\"relation\" attr.type=\"string\"/>\n"
          << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
          << "  <graph id=\"kg\" edgedefault=\"directed\">\n";
      for (const auto& e : es) {
        out << "    <node id=\"" << xml_escape(node_key(e)) << "\"><data key=\"kind\">"
            << to_string(e.kind) << "</data></node>\n";
      }
      for (const auto& t : kg.triples()) {
        out << "    <edge source=\"" << xml_escape(node_key(es[t.head])) << "\" target=\""
            << xml_escape(node_key(es[t.tail])) << "\"><data key=\"relation\">"
            << to_string(t.relation) << "</data><data key=\"weight\">" << format_double(t.weight)
            << "</data></edge>\n";
      }
      out << "  </graph>\n</graphml>\n";
      break;
  }
}

void write_entities(const KnowledgeGraph& kg, std::ostream& out) {
  csv::write_row(out, {"kind", "entity_id", "attribute", "type", "value"});
  for (const auto& e : kg.entities()) {
    const std::string kind(to_string(e.kind));
    if (e.attrs.empty()) {
      csv::write_row(out, {kind, e.id, "", "", ""});
      continue;
    }
    for (const auto& [k, v] : e.attrs) csv::write_row(out, {kind, e.id, k, type_name(v), value_text(v)});
  }
}

namespace {

void read_edges(std::istream& edges, GraphBuilder& b, bool create_missing) {
  csv::Reader reader(edges);
  csv::expect_header(reader, {"head_kind", "head_id", "relation", "tail_kind", "tail_id", "weight"});
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != 6) {
      throw ValidationError(fmt::format("edge list line {}: expected 6 fields", reader.line()));
    }
    const auto hk = parse_entity_kind((*row)[0]);
    const auto rel = parse_relation((*row)[2]);
    const auto tk = parse_entity_kind((*row)[3]);
    if (!hk || !rel || !tk) {
      throw ValidationError(fmt::format("edge list line {}: unknown kind or relation", reader.line()));
    }
    const double w = parse_weight((*row)[5], reader.line());
    if (create_missing) {
      const auto h = b.add_entity(*hk, (*row)[1]);
      const auto t = b.add_entity(*tk, (*row)[4]);
      b.add_triple(h, t, *rel, w);
    } else {
      b.add_triple(*hk, (*row)[1], *rel, *tk, (*row)[4], w);
    }
  }
}

}  // namespace

KnowledgeGraph import_graph(std::istream& edges, std::istream& entities) {
  GraphBuilder b;
  csv::Reader reader(entities);
  csv::expect_header(reader, {"kind", "entity_id", "attribute", "type", "value"});
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != 5) {
      throw ValidationError(fmt::format("entity table line {}: expected 5 fields", reader.line()));
    }
    const auto kind = parse_entity_kind((*row)[0]);
    if (!kind) {
      throw ValidationError(fmt::format("entity table line {}: unknown kind '{}'", reader.line(),
                                        (*row)[0]));
    }
    const auto i = b.add_entity(*kind, (*row)[1]);
    if (!(*row)[2].empty()) {
      b.set_attribute(i, (*row)[2], parse_value((*row)[3], (*row)[4], reader.line()));
    }
  }
  read_edges(edges, b, false);
  return std::move(b).finish();
}

KnowledgeGraph import_edge_list(std::istream& edges) {
  GraphBuilder b;
  read_edges(edges, b, true);
  return std::move(b).finish();
}

void write_statistics(const KnowledgeGraph& kg, std::ostream& out) {
  csv::write_row(out, {"section", "type", "count"});
  for (std::size_t k = 0; k < kEntityKindCount; ++k) {
    csv::write_row(out, {"entity", std::string(kKindNames[k]),
                         std::to_string(kg.count(static_cast<EntityKind>(k)))});
  }
  csv::write_row(out, {"entity", "Total", std::to_string(kg.entities().size())});
  for (std::size_t r = 0; r < kRelationCount; ++r) {
    csv::write_row(out, {"relation", std::string(kRelationNames[r]),
                         std::to_string(kg.count(static_cast<Relation>(r)))});
  }
  csv::write_row(out, {"relation", "Total", std::to_string(kg.triples().size())});
}

}  // namespace hatewatch::kg
