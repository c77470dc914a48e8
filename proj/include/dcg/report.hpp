#pragma once

#include "dcg/dominant_sets.hpp"
#include "dcg/evaluation.hpp"
#include "dcg/games.hpp"
#include "dcg/harness.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace dcg {

using Json = nlohmann::json;

Json to_json(const GameConfig& cfg);
Json to_json(const DominantSetConfig& cfg);
Json to_json(const ExperimentConfig& cfg);
Json to_json(const EvalReport& r);
Json to_json(const DominantSet& d);
Json to_json(const SeedClustering& s);
Json to_json(const GameResult& r, bool with_strategies = false);
Json to_json(const MetricSummary& m);

/// FNV-1a of the compact JSON form of the configuration.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hex64(std::uint64_t v);

/// Fixed conventions every report carries so numbers can be recomputed externally.
Json conventions();

Json static_report(const ExperimentConfig& cfg, const StaticReport& r, const CorpusStats& stats);
Json stream_report(const ExperimentConfig& cfg, const StreamRun& r, const CorpusStats& stats);

} // namespace dcg
