#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hatewatch/config.hpp"

namespace hatewatch::pipeline {

enum class Stage { Ingest, Sentiment, Kg, Timeseries, Communities, Usernet };

inline constexpr std::array<Stage, 6> kAllStages{Stage::Ingest,     Stage::Sentiment,
                                                 Stage::Kg,         Stage::Timeseries,
                                                 Stage::Communities, Stage::Usernet};

std::string_view to_string(Stage s) noexcept;
std::optional<Stage> parse_stage(std::string_view name) noexcept;

struct StageReport {
  Stage stage;
  // Artifact file names inside the output directory, manifest last.
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& file);

// The parameter values a stage reads from the config, as recorded in its manifest.
nlohmann::json stage_parameters(Stage stage, const config::PipelineConfig& config);

// Runs one stage. Throws DependencyError naming the stage to run first when an
// upstream artifact is missing from the output directory.
StageReport run_stage(Stage stage, const config::PipelineConfig& config,
                      std::ostream* log = nullptr);

// `subcommand` is a stage name or "all" (every stage in dependency order).
// Holds an exclusive lock on the output directory for the duration; throws
// std::runtime_error if another run holds it.
std::vector<StageReport> run(std::string_view subcommand, const config::PipelineConfig& config,
                             std::ostream* log = nullptr);

}  // namespace hatewatch::pipeline
