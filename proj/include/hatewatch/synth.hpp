#pragma once

#include <cstdint>
#include <filesystem>

#include "hatewatch/common.hpp"

namespace hatewatch::synth {

struct Options {
  std::uint64_t seed = 1;
  std::size_t tweets = 100'000;
  std::size_t crimes = 1'000;
  std::size_t users = 8'000;
  DateRange tweet_range{Date::from_ymd(2020, 3, 11), Date::from_ymd(2020, 12, 31)};
  DateRange crime_range{Date::from_ymd(2020, 3, 11), Date::from_ymd(2021, 7, 17)};
};

struct Summary {
  std::size_t tweets = 0;
  std::size_t keyword_tweets = 0;
  std::size_t crimes = 0;
  std::size_t users = 0;
  std::size_t topics = 0;
};

// Writes tweets.jsonl, crimes.csv, keywords.csv, lexicon.tsv, modifiers.tsv,
// assignments.jsonl, group_map.csv and config.toml into `dir` (created if
// needed). Output depends only on the options: the generator draws from
// mt19937_64 with its own sampling routines, not std:: distributions.
Summary generate(const std::filesystem::path& dir, const Options& options = {});

// The bundled lexicon and modifier tables, in the TSV formats the sentiment module reads.
void write_lexicon(std::ostream& out);
void write_modifiers(std::ostream& out);

}  // namespace hatewatch::synth
