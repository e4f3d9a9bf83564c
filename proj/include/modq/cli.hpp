#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "modq/experiments.hpp"

namespace modq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;  // bad config, bad JSON, bad variant
inline constexpr int kExitIo = 2;      // output could not be written

inline constexpr int kSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 0;

struct Options {
    std::filesystem::path output = "results";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    int jobs = 1;
    bool events = false;
};

// A labelled experiment run, the unit every output file is written from.
struct NamedRun {
    std::string setting;
    const ExperimentRun* run = nullptr;
};

// trials.csv: one row per trial.
void write_trials_csv(std::ostream& out, std::span<const NamedRun> runs);
// mods.csv: one row per (trial, mod).
void write_mods_csv(std::ostream& out, std::span<const NamedRun> runs);
// comparison.csv: one row per (setting, team size or "all", metric).
void write_comparison_csv(std::ostream& out, const Comparison& comparison);
// events.jsonl: one JSON object per engine event, in trial order.
void write_events_jsonl(std::ostream& out, std::span<const NamedRun> runs);

nlohmann::json summary_to_json(const std::string& setting, const ExperimentSummary& summary);

// Console table of cell means.
void print_table(std::ostream& out, const std::string& setting, const ExperimentSummary& summary);

int cmd_run(const std::filesystem::path& config_path, const Options& options, std::ostream& out,
            std::ostream& err);
int cmd_baseline(const Options& options, std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& config_path, const std::vector<std::string>& variants,
                const Options& options, std::ostream& out, std::ostream& err);

// Parses argv and dispatches to a command.
int main(int argc, char** argv);

}  // namespace modq::cli
