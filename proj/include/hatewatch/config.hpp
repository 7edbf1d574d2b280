#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hatewatch/common.hpp"
#include "hatewatch/communities.hpp"
#include "hatewatch/kg.hpp"
#include "hatewatch/timeseries.hpp"
#include "hatewatch/topics.hpp"

namespace hatewatch::config {

// A small TOML subset: `[section]` / `[a.b]` headers, `key = value` with bare
// or quoted keys, and values that are strings, booleans, integers, floats or
// single-type arrays of those. `#` starts a comment outside strings.
using Scalar = std::variant<bool, std::int64_t, double, std::string>;
using Array = std::vector<Scalar>;
using Value = std::variant<bool, std::int64_t, double, std::string, Array>;

struct Entry {
  Value value;
  std::size_t line = 0;
};

// Keys are dotted paths ("communities.min_size.LGBTQ+"), in file order of first definition.
using Document = std::map<std::string, Entry, std::less<>>;

// Throws ValidationError naming the line of the first syntax error or duplicate key.
Document parse_toml(std::string_view text);

struct Paths {
  std::filesystem::path tweets;
  std::filesystem::path crimes;
  std::filesystem::path keywords;
  std::filesystem::path lexicon;
  std::filesystem::path modifiers;
  std::filesystem::path assignments;
  std::filesystem::path group_map;
  std::filesystem::path output_dir;
};

struct PipelineConfig {
  Paths paths;

  DateRange crime_range{Date::from_ymd(2020, 3, 11), Date::from_ymd(2021, 7, 17)};

  topics::ThresholdPolicy threshold;
  double strong_threshold = 0.5;

  int window = 30;
  timeseries::RollingStart rolling_start = timeseries::RollingStart::Expanding;
  bool smooth_crimes = true;
  DateRange series_range{Date::from_ymd(2020, 3, 11), Date::from_ymd(2020, 12, 31)};

  // Extra exports beside the always-written CSV edge list.
  std::vector<kg::ExportFormat> kg_exports;

  std::vector<Group> community_groups{Group::Black, Group::LGBTQ};
  // Groups not listed use 1.
  std::map<Group, std::size_t> min_community_size{{Group::Black, 100}, {Group::LGBTQ, 50}};
  double gamma = 0.01;
  double resolution = 1.0;
  communities::SentimentAveraging averaging = communities::SentimentAveraging::PerTweet;

  std::vector<Group> usernet_groups{Group::Black, Group::LGBTQ};
  std::size_t min_tweets = 10;
  double bin_width = 0.05;
  std::size_t min_bin_users = 10;
  bool threshold_weights = false;
  double prune_epsilon = 0.0;
  // Rows in the top-users report; 0 writes every user.
  std::size_t top_users = 0;

  std::uint64_t seed = 0;

  std::size_t min_size_for(Group g) const;

  // Every violated domain and missing input path; empty when valid.
  std::vector<std::string> violations() const;
};

// Reads a document into a config. Relative paths resolve against base_dir.
// Unknown keys and type mismatches are violations. Throws ValidationError
// listing all violations (including those of PipelineConfig::violations).
PipelineConfig from_document(const Document& doc, const std::filesystem::path& base_dir);

// parse_toml + from_document on a file, with HATEWATCH_OUTPUT_DIR and
// HATEWATCH_SEED environment overrides applied before validation.
PipelineConfig load(const std::filesystem::path& file);

std::string_view to_string(topics::ThresholdScope s) noexcept;
std::string_view to_string(timeseries::RollingStart s) noexcept;
std::string_view to_string(communities::SentimentAveraging a) noexcept;
std::string_view to_string(kg::ExportFormat f) noexcept;

}  // namespace hatewatch::config
