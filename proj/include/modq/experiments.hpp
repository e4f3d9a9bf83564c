#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "modq/core.hpp"
#include "modq/engine.hpp"
#include "modq/metrics.hpp"

namespace modq {

// Seed layout. Everything in a trial derives from the master seed:
//   trial seed     = derive_seed(master, team_size, trial)
//   report stream  = derive_seed(master, kReportStream, trial)
//   view stream    = derive_seed(trial seed, kViewStream)
//   selection seed = derive_seed(trial seed, kSelectionStream)
// Team sizes are >= 1, so kReportStream = 0 never aliases a trial seed, and
// the report set of trial t is the same for every team size.
inline constexpr std::uint64_t kReportStream = 0;
inline constexpr std::uint64_t kViewStream = 1;
inline constexpr std::uint64_t kSelectionStream = 2;

std::uint64_t trial_seed(std::uint64_t master_seed, int team_size, int trial);
std::uint64_t report_seed(std::uint64_t master_seed, int trial);

ExperimentConfig baseline_preset();

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation over trials; 0 for one trial
};

MeanSd mean_sd(std::span<const double> values);

struct CellSummary {
    int team_size = 0;
    int trials = 0;
    MeanSd completion_time;
    MeanSd collisions;
    // Per-trial means over the team, then summarized over trials.
    MeanSd work_time;
    MeanSd redundant_time;
    MeanSd reports_seen;
    MeanSd reports_completed;
    MeanSd seen_variance;       // within-trial population variance across mods
    MeanSd completed_variance;
    MeanSd toxic_seen;
    MeanSd toxic_completed;
    MeanSd longest_toxic_run;
    MeanSd completed_seen_ratio;  // sum(completed) / sum(seen) per trial
    OptimalValues optimal;        // toxic_per_mod averaged over trials
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    int trials = 0;
    std::vector<CellSummary> cells;  // one per team size, in config order
};

struct TrialRecord {
    int team_size = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    OptimalValues optimal;
    TrialResult result;
    std::vector<TrialEvent> events;  // filled only when RunOptions::record_events
};

struct ExperimentRun {
    ExperimentSummary summary;
    std::vector<TrialRecord> trials;  // sorted by (cell, trial)
};

struct RunOptions {
    int jobs = 1;
    bool record_events = false;
};

// Raised when a trial fails; carries the (team_size, trial) coordinate.
class TrialError : public std::runtime_error {
public:
    TrialError(int team_size, int trial, const std::string& what);
    int team_size() const { return team_size_; }
    int trial() const { return trial_; }

private:
    int team_size_;
    int trial_;
};

// Runs one trial of `config` at the given coordinate.
TrialRecord run_single_trial(const ExperimentConfig& config, int team_size, int trial,
                             bool record_events = false);

CellSummary summarize_cell(int team_size, std::span<const TrialRecord> records);

// Validates, runs every (team size, trial) and aggregates. Output does not
// depend on `jobs`.
ExperimentRun run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// A named modification of the base config.
struct ConfigDelta {
    std::optional<ViewPolicy> view_policy;
    std::optional<bool> distribute_toxicity;
    std::optional<double> awareness;

    ExperimentConfig apply(ExperimentConfig base) const;
};

struct Variant {
    std::string name;
    ConfigDelta delta;
};

// Parses names like "reverse", "random", "distribute-toxicity",
// "awareness=0.2" and '+'-joined combinations ("random+awareness=0.4").
// Throws std::invalid_argument on an unknown name or an awareness outside [0,1].
Variant parse_variant(std::string_view text);

struct Setting {
    std::string name;
    ExperimentRun run;
};

// One metric of one setting, either for a single team size or (team_size
// empty) aggregated over all team sizes. Percent changes are
// 100 * (value - base) / base, so reductions are negative.
struct ComparisonRow {
    std::string setting;
    std::optional<int> team_size;
    std::string metric;
    double mean = 0.0;       // per-size mean; for the aggregate row, the average over sizes
    double base_mean = 0.0;
    double pct_change = 0.0;          // aggregate row: average of per-size changes
    double pct_change_of_means = 0.0; // aggregate row: change of the averaged means
};

struct Comparison {
    std::vector<Setting> settings;  // base first
    std::vector<ComparisonRow> rows;

    // Aggregate-row lookup; throws std::out_of_range if absent.
    const ComparisonRow& overall(std::string_view setting, std::string_view metric) const;
    const ComparisonRow& at(std::string_view setting, int team_size, std::string_view metric) const;
};

inline constexpr std::string_view kBaseSetting = "base";

// Metrics compared, in row order.
std::span<const std::string_view> comparison_metrics();

// Value of a named comparison metric from a cell.
double cell_metric(const CellSummary& cell, std::string_view metric);

// Runs base and each variant with the base master seed and tabulates changes.
Comparison compare_interventions(const ExperimentConfig& base, std::span<const Variant> variants,
                                 const RunOptions& options = {});

// One variant per awareness level, named "awareness=<level>". Throws
// std::invalid_argument when a level lies outside [0,1].
Comparison sweep_awareness(const ExperimentConfig& base, std::span<const double> levels,
                           const RunOptions& options = {});

std::string format_level(double value);

}  // namespace modq
