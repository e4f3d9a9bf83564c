#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "modq/core.hpp"

namespace modq {

// JSON form of ExperimentConfig. Field names are the struct member names.
// Tagged variants use a "kind" member:
//   "strategy": {"kind": "top_two", "p_first": 0.6} | {"kind": "uniform"}
//   "toxicity": {"kind": "bernoulli_zero_one", "p_toxic": 0.5}
//             | {"kind": "explicit", "values": [...]}
//   "report_length": 5 | [5, 3, ...]
// Omitted fields keep their baseline defaults. Unknown fields, wrong types
// and unknown kinds throw ConfigError listing every problem found.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& doc);

// Reads and parses a config file. Throws nlohmann::json::parse_error on
// malformed JSON (its message carries the byte position and line/column),
// ConfigError on schema problems and std::runtime_error if the file cannot
// be opened. The result is not validated.
ExperimentConfig load_config(const std::filesystem::path& path);

// FNV-1a over the compact dump of config_to_json.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace modq
