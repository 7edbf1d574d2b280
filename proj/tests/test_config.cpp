#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "hatewatch/config.hpp"

using namespace hatewatch;
using namespace hatewatch::config;
namespace fs = std::filesystem;

namespace {

const char* kPaths = R"(
[paths]
tweets = "tweets.jsonl"
crimes = "crimes.csv"
keywords = "keywords.csv"
lexicon = "lexicon.tsv"
modifiers = "modifiers.tsv"
assignments = "assignments.jsonl"
group_map = "group_map.csv"
output_dir = "out"
)";

// A directory holding empty input files.
fs::path input_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hatewatch-config-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const char* f : {"tweets.jsonl", "crimes.csv", "keywords.csv", "lexicon.tsv", "modifiers.tsv",
                        "assignments.jsonl", "group_map.csv"}) {
    std::ofstream(dir / f) << "";
  }
  return dir;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Toml, ScalarsArraysAndSections) {
  const auto doc = parse_toml(R"(# leading comment
seed = 1_000
name = "a # not a comment"
escaped = "tab\there \"q\""
ratio = 0.25
neg = -3e-2
flag = true

[a.b]
list = ["x", "y"]   # trailing
multi = [
  1,
  2,
]
"LGBTQ+" = 5
dotted.key = false
)");
  EXPECT_EQ(std::get<std::int64_t>(doc.at("seed").value), 1000);
  EXPECT_EQ(std::get<std::string>(doc.at("name").value), "a # not a comment");
  EXPECT_EQ(std::get<std::string>(doc.at("escaped").value), "tab\there \"q\"");
  EXPECT_EQ(std::get<double>(doc.at("ratio").value), 0.25);
  EXPECT_EQ(std::get<double>(doc.at("neg").value), -0.03);
  EXPECT_TRUE(std::get<bool>(doc.at("flag").value));
  const auto& list = std::get<Array>(doc.at("a.b.list").value);
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(std::get<std::string>(list[1]), "y");
  EXPECT_EQ(std::get<Array>(doc.at("a.b.multi").value).size(), 2u);
  EXPECT_EQ(std::get<std::int64_t>(doc.at("a.b.LGBTQ+").value), 5);
  EXPECT_FALSE(std::get<bool>(doc.at("a.b.dotted.key").value));
  EXPECT_EQ(doc.at("ratio").line, 5u);
}

TEST(Toml, SyntaxErrorsNameTheLine) {
  EXPECT_NE(message_of([] { parse_toml("a = 1\nb = \n"); }).find("line 2"), std::string::npos);
  EXPECT_NE(message_of([] { parse_toml("a = 1\na = 2\n"); }).find("line 2"), std::string::npos);
  EXPECT_THROW(parse_toml("[s]\n[s]\n"), ValidationError);
  EXPECT_THROW(parse_toml("a = \"open\n"), ValidationError);
  EXPECT_THROW(parse_toml("a = [1, \"x\"]\n"), ValidationError);
  EXPECT_THROW(parse_toml("[broken\n"), ValidationError);
  EXPECT_THROW(parse_toml("a = 1 2\n"), ValidationError);
}

TEST(Config, DefaultsAndRelativePaths) {
  const auto dir = input_dir("defaults");
  const auto c = from_document(parse_toml(kPaths), dir);
  EXPECT_EQ(c.paths.tweets, dir / "tweets.jsonl");
  EXPECT_EQ(c.paths.output_dir, dir / "out");
  EXPECT_EQ(c.window, 30);
  EXPECT_EQ(c.threshold.theta, 0.01);
  EXPECT_EQ(c.gamma, 0.01);
  EXPECT_EQ(c.min_size_for(Group::Black), 100u);
  EXPECT_EQ(c.min_size_for(Group::LGBTQ), 50u);
  EXPECT_EQ(c.min_size_for(Group::Asian), 1u);
  EXPECT_EQ(c.series_range.first.to_string(), "2020-03-11");
  EXPECT_TRUE(c.violations().empty());
}

TEST(Config, ReadsEverySection) {
  const auto dir = input_dir("sections");
  const auto c = from_document(parse_toml(std::string(kPaths) + R"(
[topics]
theta = 0.05
threshold_scope = "miscellaneous"
miscellaneous_topic = 7
[sentiment]
strong_threshold = 0.6
[timeseries]
window = 7
rolling_start = "drop"
smooth_crimes = false
start = "2020-04-01"
end = "2020-04-30"
[kg]
exports = ["dot", "graphml"]
[communities]
groups = ["Asian"]
gamma = 0.2
resolution = 1.5
averaging = "user"
[communities.min_size]
Asian = 3
"LGBTQ+" = 4
[usernet]
groups = ["Jewish", "Hispanic"]
min_tweets = 2
bin_width = 0.1
min_bin_users = 3
threshold_weights = true
prune_epsilon = 0.001
top_users = 50
)"),
                               dir);
  EXPECT_EQ(c.threshold.theta, 0.05);
  EXPECT_EQ(c.threshold.scope, topics::ThresholdScope::MiscellaneousOnly);
  EXPECT_EQ(c.threshold.miscellaneous_topic, 7);
  EXPECT_EQ(c.strong_threshold, 0.6);
  EXPECT_EQ(c.window, 7);
  EXPECT_EQ(c.rolling_start, timeseries::RollingStart::Drop);
  EXPECT_FALSE(c.smooth_crimes);
  EXPECT_EQ(c.series_range.length(), 30);
  EXPECT_EQ(c.kg_exports.size(), 2u);
  EXPECT_EQ(c.community_groups, (std::vector<Group>{Group::Asian}));
  EXPECT_EQ(c.min_size_for(Group::Asian), 3u);
  EXPECT_EQ(c.min_size_for(Group::LGBTQ), 4u);
  EXPECT_EQ(c.averaging, communities::SentimentAveraging::PerUser);
  EXPECT_EQ(c.usernet_groups, (std::vector<Group>{Group::Jewish, Group::Hispanic}));
  EXPECT_EQ(c.min_tweets, 2u);
  EXPECT_TRUE(c.threshold_weights);
  EXPECT_EQ(c.top_users, 50u);
}

TEST(Config, ListsEveryViolation) {
  const auto dir = input_dir("violations");
  fs::remove(dir / "lexicon.tsv");
  const std::string msg = message_of([&] {
    from_document(parse_toml(std::string(kPaths) + R"(
[topics]
theta = 0.0
[timeseries]
window = 1000
[communities]
gamma = 1.5
groups = ["Martian"]
[usernet]
bin_width = "wide"
surprise = 1
)"),
                  dir);
  });
  EXPECT_NE(msg.find("invalid configuration"), std::string::npos);
  for (const char* needle : {"lexicon", "theta", "window", "gamma", "Martian", "bin_width", "usernet.surprise"}) {
    EXPECT_NE(msg.find(needle), std::string::npos) << needle << "\n" << msg;
  }
}

TEST(Config, MissingPathsAreViolations) {
  PipelineConfig c;
  const auto v = c.violations();
  EXPECT_GE(v.size(), 8u);
}

TEST(Config, EnvironmentOverrides) {
  const auto dir = input_dir("env");
  std::ofstream(dir / "config.toml") << "seed = 4\n" << kPaths;
  EXPECT_EQ(load(dir / "config.toml").seed, 4u);
  setenv("HATEWATCH_SEED", "99", 1);
  setenv("HATEWATCH_OUTPUT_DIR", "/tmp/hatewatch-env-out", 1);
  const auto c = load(dir / "config.toml");
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.paths.output_dir, fs::path("/tmp/hatewatch-env-out"));
  setenv("HATEWATCH_SEED", "minus one", 1);
  EXPECT_THROW(load(dir / "config.toml"), ValidationError);
  unsetenv("HATEWATCH_SEED");
  unsetenv("HATEWATCH_OUTPUT_DIR");
}
