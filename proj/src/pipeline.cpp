#include "hatewatch/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <unordered_map>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "hatewatch/communities.hpp"
#include "hatewatch/ingest.hpp"
#include "hatewatch/kg.hpp"
#include "hatewatch/sentiment.hpp"
#include "hatewatch/timeseries.hpp"
#include "hatewatch/topics.hpp"
#include "hatewatch/usernet.hpp"

namespace hatewatch::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;
using config::PipelineConfig;

namespace {

constexpr std::string_view kFilteredTweets = "tweets.filtered.jsonl";
constexpr std::string_view kFilteredCrimes = "crimes.filtered.csv";
constexpr std::string_view kAugmentedKeywords = "keywords.augmented.csv";
constexpr std::string_view kScoredTweets = "tweets.scored.jsonl";
constexpr std::string_view kKgEdges = "kg.edges.csv";
constexpr std::string_view kKgEntities = "kg.entities.csv";

class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) {
    const auto file = dir / ".hatewatch.lock";
    fd_ = ::open(file.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw std::runtime_error("cannot open lock file " + file.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw std::runtime_error("output directory " + dir.string() +
                               " is in use by another hatewatch run");
    }
  }
  ~OutputLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  int fd_ = -1;
};

std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return in;
}

// Writes artifacts atomically and collects what the manifest needs.
class StageContext {
 public:
  StageContext(Stage stage, const PipelineConfig& config, std::ostream* log)
      : stage_(stage), config_(config), log_(log), dir_(config.paths.output_dir) {
    report_.stage = stage;
  }

  const PipelineConfig& config() const { return config_; }
  fs::path artifact(std::string_view name) const { return dir_ / name; }

  void require(std::string_view name, Stage producer) {
    const auto p = artifact(name);
    if (!fs::exists(p)) {
      throw DependencyError(fmt::format("{} needs {} in {}; run `hatewatch {}` first",
                                        to_string(stage_), name, dir_.string(),
                                        to_string(producer)));
    }
    record_input(name, p);
  }
  void input(std::string_view name, const fs::path& p) { record_input(name, p); }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const auto target = artifact(name);
    const auto tmp = artifact(name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      body(out);
      out.flush();
      if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
    report_.outputs.push_back(name);
    info("wrote {}", name);
  }

  template <typename... Args>
  void info(fmt::format_string<Args...> f, Args&&... args) {
    if (log_) *log_ << fmt::format("[{}] ", to_string(stage_)) << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  void warn(std::string w) {
    if (log_) *log_ << fmt::format("[{}] warning: {}\n", to_string(stage_), w);
    report_.warnings.push_back(std::move(w));
  }

  StageReport finish() {
    json outputs = json::array();
    for (const auto& name : report_.outputs) {
      outputs.push_back({{"file", name}, {"sha256", sha256_file(artifact(name))}});
    }
    json manifest = {{"stage", to_string(stage_)},
                     {"parameters", stage_parameters(stage_, config_)},
                     {"inputs", inputs_},
                     {"outputs", outputs},
                     {"warnings", report_.warnings}};
    const std::string name = fmt::format("manifest.{}.json", to_string(stage_));
    write(name, [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });
    return std::move(report_);
  }

 private:
  void record_input(std::string_view name, const fs::path& p) {
    inputs_[std::string(name)] = {{"file", p.filename().string()}, {"sha256", sha256_file(p)}};
  }

  Stage stage_;
  const PipelineConfig& config_;
  std::ostream* log_;
  fs::path dir_;
  json inputs_ = json::object();
  StageReport report_;
};

std::vector<ingest::TweetRecord> load_tweets(StageContext& ctx, std::string_view name) {
  auto in = open_input(ctx.artifact(name));
  auto result = ingest::read_tweets(in);
  if (!result.rejects.empty()) {
    throw std::runtime_error(fmt::format("{} has {} malformed lines (first at line {}: {})", name,
                                         result.rejects.size(), result.rejects.front().line_number,
                                         result.rejects.front().reason));
  }
  return std::move(result.records);
}

std::vector<ingest::CrimeRecord> load_filtered_crimes(StageContext& ctx) {
  auto in = open_input(ctx.artifact(kFilteredCrimes));
  return ingest::load_crimes(in, ctx.config().crime_range).records;
}

std::vector<topics::TopicAssignment> load_assignments(StageContext& ctx) {
  const auto& p = ctx.config().paths.assignments;
  ctx.input("assignments", p);
  auto in = open_input(p);
  auto result = topics::read_assignments(in);
  if (!result.rejects.empty()) {
    ctx.warn(fmt::format("{} assignment lines rejected (first at line {}: {})",
                         result.rejects.size(), result.rejects.front().line_number,
                         result.rejects.front().reason));
  }
  return std::move(result.records);
}

topics::TopicGroupMap load_group_map(StageContext& ctx) {
  const auto& p = ctx.config().paths.group_map;
  ctx.input("group_map", p);
  auto in = open_input(p);
  return topics::read_group_map(in);
}

void stage_ingest(StageContext& ctx) {
  const auto& c = ctx.config();
  ctx.input("keywords", c.paths.keywords);
  ctx.input("tweets", c.paths.tweets);
  ctx.input("crimes", c.paths.crimes);

  auto kin = open_input(c.paths.keywords);
  const auto keywords = ingest::augment_keywords(ingest::read_keywords(kin));
  ctx.write(std::string(kAugmentedKeywords),
            [&](std::ostream& out) { ingest::write_keywords(out, keywords); });

  auto tin = open_input(c.paths.tweets);
  auto tweets = ingest::read_tweets(tin);
  const std::size_t loaded = tweets.records.size();
  const auto filtered = ingest::filter_tweets(std::move(tweets.records), keywords);
  ctx.info("{} tweets loaded, {} rejected, {} kept by keywords", loaded, tweets.rejects.size(),
           filtered.size());
  ctx.write(std::string(kFilteredTweets), [&](std::ostream& out) { ingest::write_tweets(out, filtered); });
  ctx.write("rejects.tweets.jsonl",
            [&](std::ostream& out) { ingest::write_rejects(out, tweets.rejects); });

  auto cin = open_input(c.paths.crimes);
  const auto crimes = ingest::load_crimes(cin, c.crime_range);
  for (const auto& w : crimes.warnings) ctx.warn(w);
  ctx.info("{} crimes in range, {} rejected", crimes.records.size(), crimes.rejects.size());
  ctx.write(std::string(kFilteredCrimes),
            [&](std::ostream& out) { ingest::write_crimes(out, crimes.records); });
  ctx.write("rejects.crimes.jsonl",
            [&](std::ostream& out) { ingest::write_rejects(out, crimes.rejects); });
}

void stage_sentiment(StageContext& ctx) {
  const auto& c = ctx.config();
  ctx.require(kFilteredTweets, Stage::Ingest);
  ctx.input("lexicon", c.paths.lexicon);
  ctx.input("modifiers", c.paths.modifiers);
  auto vin = open_input(c.paths.lexicon);
  auto min = open_input(c.paths.modifiers);
  const auto lexicon = sentiment::Lexicon::load(vin, min);

  auto tweets = load_tweets(ctx, kFilteredTweets);
  std::size_t strong = 0;
  for (auto& t : tweets) {
    const auto s = sentiment::score(t.clean_text, lexicon, c.strong_threshold);
    t.sentiment = s.compound;
    t.strong_sentiment = s.is_strong;
    strong += s.is_strong ? 1 : 0;
  }
  ctx.info("{} tweets scored, {} strong", tweets.size(), strong);
  ctx.write(std::string(kScoredTweets), [&](std::ostream& out) { ingest::write_tweets(out, tweets); });
}

void stage_kg(StageContext& ctx) {
  const auto& c = ctx.config();
  ctx.require(kScoredTweets, Stage::Sentiment);
  ctx.require(kFilteredCrimes, Stage::Ingest);
  const auto tweets = load_tweets(ctx, kScoredTweets);
  const auto crimes = load_filtered_crimes(ctx);
  const auto assignments = load_assignments(ctx);
  const auto map = load_group_map(ctx);

  const auto graph = kg::build(tweets, crimes, assignments, map, {c.threshold});
  ctx.info("{} entities, {} triples", graph.entities().size(), graph.triples().size());
  ctx.write(std::string(kKgEdges),
            [&](std::ostream& out) { kg::export_graph(graph, kg::ExportFormat::EdgeListCsv, out); });
  ctx.write(std::string(kKgEntities), [&](std::ostream& out) { kg::write_entities(graph, out); });
  ctx.write("kg.stats.csv", [&](std::ostream& out) { kg::write_statistics(graph, out); });
  for (const auto f : c.kg_exports) {
    const std::string name = f == kg::ExportFormat::Dot ? "kg.dot" : "kg.graphml";
    ctx.write(name, [&](std::ostream& out) { kg::export_graph(graph, f, out); });
  }
}

// Tweets whose thresholded topics reach some group, with those groups.
std::vector<std::pair<const ingest::TweetRecord*, GroupSet>> grouped_tweets(
    const std::vector<ingest::TweetRecord>& tweets,
    const std::vector<topics::TopicAssignment>& assignments, const topics::TopicGroupMap& map,
    const topics::ThresholdPolicy& policy) {
  std::unordered_map<std::string_view, const topics::TopicAssignment*> by_id;
  for (const auto& a : assignments) by_id.emplace(a.tweet_id, &a);
  std::vector<std::pair<const ingest::TweetRecord*, GroupSet>> out;
  for (const auto& t : tweets) {
    const auto it = by_id.find(t.tweet_id);
    if (it == by_id.end()) continue;
    const GroupSet g = topics::groups_of(topics::thresholded_topics(*it->second, policy), map);
    if (!g.empty()) out.emplace_back(&t, g);
  }
  return out;
}

void stage_timeseries(StageContext& ctx) {
  using timeseries::Metric;
  const auto& c = ctx.config();
  ctx.require(kScoredTweets, Stage::Sentiment);
  ctx.require(kFilteredCrimes, Stage::Ingest);
  const auto tweets = load_tweets(ctx, kScoredTweets);
  const auto crimes = load_filtered_crimes(ctx);
  const auto assignments = load_assignments(ctx);
  const auto map = load_group_map(ctx);

  std::vector<timeseries::TweetObservation> obs;
  for (const auto& [t, groups] : grouped_tweets(tweets, assignments, map, c.threshold)) {
    if (!t->sentiment) continue;
    obs.push_back({date_of(t->created_at), *t->sentiment, t->strong_sentiment, groups});
  }

  std::vector<timeseries::DailySeries> series;
  std::vector<timeseries::CorrelationRow> rows;
  const std::string suffix = fmt::format(":rolling{}", c.window);
  for (Group g : kAllGroups) {
    auto crime = timeseries::group_series(obs, crimes, g, Metric::CrimeCount, c.series_range);
    auto crime_y = crime;
    if (c.smooth_crimes) {
      crime_y = timeseries::rolling_mean(crime, c.window, c.rolling_start);
      crime_y.label += suffix;
    }
    series.push_back(crime);
    if (c.smooth_crimes) series.push_back(crime_y);
    for (Metric m : {Metric::TweetCount, Metric::MeanSentiment, Metric::StrongProportion}) {
      const auto raw = timeseries::group_series(obs, crimes, g, m, c.series_range);
      auto smooth = timeseries::rolling_mean(raw, c.window, c.rolling_start);
      smooth.label += suffix;
      timeseries::CorrelationRow row{smooth.label, crime_y.label, {}};
      try {
        row.result = timeseries::spearman(smooth, crime_y);
      } catch (const std::exception& e) {
        row.result = {std::nan(""), std::nan(""), 0};
        ctx.warn(fmt::format("{} vs {}: {}", row.x_label, row.y_label, e.what()));
      }
      rows.push_back(std::move(row));
      series.push_back(raw);
      series.push_back(std::move(smooth));
    }
  }
  ctx.write("timeseries.csv", [&](std::ostream& out) { timeseries::write_series(out, series); });
  ctx.write("correlations.csv",
            [&](std::ostream& out) { timeseries::write_correlations(out, rows); });
}

void stage_communities(StageContext& ctx) {
  const auto& c = ctx.config();
  ctx.require(kKgEdges, Stage::Kg);
  ctx.require(kKgEntities, Stage::Kg);
  auto ein = open_input(ctx.artifact(kKgEdges));
  auto nin = open_input(ctx.artifact(kKgEntities));
  const auto graph = kg::import_graph(ein, nin);

  for (Group g : c.community_groups) {
    communities::EvolutionOptions opt;
    opt.louvain.resolution = c.resolution;
    opt.louvain.seed = c.seed;
    opt.gamma = c.gamma;
    opt.min_size = c.min_size_for(g);
    opt.averaging = c.averaging;
    std::vector<std::string> warnings;
    const auto evo = communities::community_evolution(graph, g, opt, &warnings);
    for (auto& w : warnings) ctx.warn(std::move(w));
    ctx.info("{}: {} communities, {} links", to_string(g), evo.nodes.size(), evo.edges.size());
    const std::string base = fmt::format("communities.{}", slug(g));
    ctx.write(base + ".nodes.csv", [&](std::ostream& out) { communities::write_nodes(out, evo); });
    ctx.write(base + ".edges.csv", [&](std::ostream& out) { communities::write_edges(out, evo); });
    ctx.write(base + ".dot", [&](std::ostream& out) {
      communities::write_dot(out, evo, fmt::format("{} community evolution", to_string(g)));
    });
  }
}

void stage_usernet(StageContext& ctx) {
  const auto& c = ctx.config();
  ctx.require(kScoredTweets, Stage::Sentiment);
  const auto tweets = load_tweets(ctx, kScoredTweets);
  const auto assignments = load_assignments(ctx);
  const auto map = load_group_map(ctx);

  std::vector<ingest::TweetRecord> active;
  for (const auto& [t, groups] : grouped_tweets(tweets, assignments, map, c.threshold)) {
    active.push_back(*t);
  }

  for (Group g : c.usernet_groups) {
    std::vector<usernet::InfluenceRecord> records;
    std::vector<usernet::SentimentBin> bins;
    const auto L = map.topics_in(g);
    if (L.empty()) {
      ctx.warn(fmt::format("no topics mapped to {}; reports are empty", to_string(g)));
    } else {
      usernet::NetworkOptions opt;
      opt.min_tweets = c.min_tweets;
      opt.threshold = c.threshold;
      opt.threshold_weights = c.threshold_weights;
      opt.prune_epsilon = c.prune_epsilon;
      try {
        const auto net = usernet::build_network(active, assignments, L, g, opt);
        const auto centrality = usernet::eigenvector_centrality(net);
        records = usernet::influence_records(net, centrality);
        bins = usernet::binned_influence_by_sentiment(records, c.bin_width, c.min_bin_users);
        ctx.info("{}: {} users, {} reported bins", to_string(g), net.size(), bins.size());
      } catch (const ValidationError& e) {
        ctx.warn(fmt::format("{}: {}; reports are empty", to_string(g), e.what()));
      }
    }
    const std::string base = fmt::format("usernet.{}", slug(g));
    ctx.write(base + ".top_users.csv",
              [&](std::ostream& out) { usernet::write_top_users(out, records, c.top_users); });
    ctx.write(base + ".binned.csv", [&](std::ostream& out) { usernet::write_bins(out, bins); });
  }
}

json group_list(const std::vector<Group>& groups) {
  json out = json::array();
  for (Group g : groups) out.push_back(to_string(g));
  return out;
}

json threshold_json(const topics::ThresholdPolicy& p) {
  return {{"theta", p.theta},
          {"scope", config::to_string(p.scope)},
          {"miscellaneous_topic", p.miscellaneous_topic}};
}

}  // namespace

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Sentiment: return "sentiment";
    case Stage::Kg: return "kg";
    case Stage::Timeseries: return "timeseries";
    case Stage::Communities: return "communities";
    case Stage::Usernet: return "usernet";
  }
  return "";
}

std::optional<Stage> parse_stage(std::string_view name) noexcept {
  for (Stage s : kAllStages) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string sha256_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> md(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!md || EVP_DigestInit_ex(md.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 initialisation failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(md.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(md.get(), digest, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

json stage_parameters(Stage stage, const PipelineConfig& c) {
  switch (stage) {
    case Stage::Ingest:
      return {{"crime_start", c.crime_range.first.to_string()},
              {"crime_end", c.crime_range.last.to_string()}};
    case Stage::Sentiment:
      return {{"strong_threshold", c.strong_threshold},
              {"alpha", sentiment::kAlpha},
              {"negation_scalar", sentiment::kNegationScalar},
              {"lookback", sentiment::kLookback}};
    case Stage::Kg: {
      json exports = json::array({"csv"});
      for (auto f : c.kg_exports) exports.push_back(config::to_string(f));
      return {{"threshold", threshold_json(c.threshold)}, {"exports", exports}};
    }
    case Stage::Timeseries:
      return {{"threshold", threshold_json(c.threshold)},
              {"window", c.window},
              {"rolling_start", config::to_string(c.rolling_start)},
              {"smooth_crimes", c.smooth_crimes},
              {"start", c.series_range.first.to_string()},
              {"end", c.series_range.last.to_string()},
              {"crime_start", c.crime_range.first.to_string()},
              {"crime_end", c.crime_range.last.to_string()}};
    case Stage::Communities: {
      json sizes = json::object();
      for (Group g : c.community_groups) sizes[std::string(to_string(g))] = c.min_size_for(g);
      return {{"groups", group_list(c.community_groups)},
              {"gamma", c.gamma},
              {"resolution", c.resolution},
              {"seed", c.seed},
              {"min_size", sizes},
              {"averaging", config::to_string(c.averaging)}};
    }
    case Stage::Usernet:
      return {{"groups", group_list(c.usernet_groups)},
              {"threshold", threshold_json(c.threshold)},
              {"min_tweets", c.min_tweets},
              {"bin_width", c.bin_width},
              {"min_bin_users", c.min_bin_users},
              {"threshold_weights", c.threshold_weights},
              {"prune_epsilon", c.prune_epsilon},
              {"top_users", c.top_users}};
  }
  return json::object();
}

StageReport run_stage(Stage stage, const PipelineConfig& config, std::ostream* log) {
  fs::create_directories(config.paths.output_dir);
  StageContext ctx(stage, config, log);
  switch (stage) {
    case Stage::Ingest: stage_ingest(ctx); break;
    case Stage::Sentiment: stage_sentiment(ctx); break;
    case Stage::Kg: stage_kg(ctx); break;
    case Stage::Timeseries: stage_timeseries(ctx); break;
    case Stage::Communities: stage_communities(ctx); break;
    case Stage::Usernet: stage_usernet(ctx); break;
  }
  return ctx.finish();
}

std::vector<StageReport> run(std::string_view subcommand, const PipelineConfig& config,
                             std::ostream* log) {
  std::vector<Stage> stages;
  if (subcommand == "all") {
    stages.assign(kAllStages.begin(), kAllStages.end());
  } else if (const auto s = parse_stage(subcommand)) {
    stages.push_back(*s);
  } else {
    throw ValidationError(fmt::format("unknown subcommand '{}'", subcommand));
  }
  fs::create_directories(config.paths.output_dir);
  OutputLock lock(config.paths.output_dir);
  std::vector<StageReport> reports;
  for (Stage s : stages) reports.push_back(run_stage(s, config, log));
  return reports;
}

}  // namespace hatewatch::pipeline
