#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hatewatch/config.hpp"
#include "hatewatch/pipeline.hpp"
#include "hatewatch/synth.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct StageArgs {
  std::string config;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int run_pipeline(const std::string& subcommand, const StageArgs& args) {
  using namespace hatewatch;
  try {
    auto cfg = config::load(args.config);
    if (!args.output_dir.empty()) cfg.paths.output_dir = args.output_dir;
    if (args.seed) cfg.seed = *args.seed;
    const auto reports = pipeline::run(subcommand, cfg, args.quiet ? nullptr : &std::cerr);
    std::size_t warnings = 0;
    for (const auto& r : reports) warnings += r.warnings.size();
    if (!args.quiet) {
      std::cerr << fmt::format("done: {} stage(s), {} warning(s), outputs in {}\n", reports.size(),
                               warnings, cfg.paths.output_dir.string());
    }
    return kOk;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DependencyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hate-speech and hate-crime analytics over tweet and incident corpora"};
  app.require_subcommand(1);

  StageArgs stage_args;
  const auto add_stage = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", stage_args.config, "TOML-style configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", stage_args.output_dir,
                    "Artifact directory (overrides the config and HATEWATCH_OUTPUT_DIR)");
    sub->add_option("--seed", stage_args.seed, "Random seed (overrides the config and HATEWATCH_SEED)");
    sub->add_flag("-q,--quiet", stage_args.quiet, "Only report errors");
    return sub;
  };
  add_stage("ingest", "Clean and keyword-filter tweets; date-filter crimes");
  add_stage("sentiment", "Score filtered tweets with the lexicon");
  add_stage("kg", "Build and export the knowledge graph");
  add_stage("timeseries", "Rolling daily metrics and rank correlations with crime counts");
  add_stage("communities", "Monthly communities and their evolution graph per group");
  add_stage("usernet", "User similarity networks, centrality and influence reports");
  add_stage("all", "Run every stage in dependency order");

  hatewatch::synth::Options gen;
  std::string gen_dir;
  auto* generate = app.add_subcommand("generate", "Write a seeded synthetic corpus and config");
  generate->add_option("-o,--out", gen_dir, "Directory to write into")->required();
  generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  generate->add_option("--tweets", gen.tweets, "Number of tweets")->capture_default_str();
  generate->add_option("--crimes", gen.crimes, "Number of crime incidents")->capture_default_str();
  generate->add_option("--users", gen.users, "Number of users")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  if (generate->parsed()) {
    try {
      const auto s = hatewatch::synth::generate(gen_dir, gen);
      std::cerr << fmt::format("wrote {} tweets ({} with keywords), {} crimes, {} topics to {}\n",
                               s.tweets, s.keyword_tweets, s.crimes, s.topics, gen_dir);
      return kOk;
    } catch (const hatewatch::ValidationError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsageError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kRuntimeFailure;
    }
  }
  return run_pipeline(app.get_subcommands().front()->get_name(), stage_args);
}
