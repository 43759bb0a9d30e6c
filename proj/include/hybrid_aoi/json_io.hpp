#pragma once

// JSON bindings for the library's value types. Used by the file formats and
// by the experiment manifests.

#include <filesystem>

#include "json.hpp"

#include "hybrid_aoi/campaign.hpp"
#include "hybrid_aoi/model.hpp"
#include "hybrid_aoi/scenario.hpp"
#include "hybrid_aoi/solver.hpp"
#include "hybrid_aoi/sweep.hpp"

namespace hybrid_aoi {

inline constexpr int kSchemaVersion = 1;

void to_json(nlohmann::json& j, const GenerationConfig& c);
void from_json(const nlohmann::json& j, GenerationConfig& c);

nlohmann::json scenario_to_json(const Scenario& s);
// Throws ScenarioError; structural problems use invariant "file.schema".
Scenario scenario_from_json(const nlohmann::json& j);

// Missing keys keep their defaults. Throws std::invalid_argument on bad values.
void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

// Keys: generation, seeds (explicit list) or seed_base + seed_count, gap_target,
// node_limit, time_limit_seconds, workers.
void to_json(nlohmann::json& j, const SweepSettings& c);
void from_json(const nlohmann::json& j, SweepSettings& c);

nlohmann::json schedule_to_json(const Schedule& x);
// Throws ScenarioError "file.schema" on malformed input.
Schedule schedule_from_json(const nlohmann::json& j, const Scenario& s);

nlohmann::json report_to_json(const FeasibilityReport& report);
nlohmann::json solution_to_json(const Solution& sol);
nlohmann::json aoi_to_json(const AoIMetrics& m);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j,
                     const std::filesystem::path& path);

}  // namespace hybrid_aoi
