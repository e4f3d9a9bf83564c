#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "modq/rng.hpp"

namespace modq {

using ReportId = std::uint32_t;
using ModId = std::uint32_t;

// A queued item awaiting review. `length` is the number of ticks one
// moderator must spend on it; `toxicity` lies in [0, 1].
struct Report {
    ReportId id = 0;
    int length = 1;
    double toxicity = 0.0;

    friend bool operator==(const Report&, const Report&) = default;
};

// Display order of the queue for one moderator: order[position] = report id.
struct ModqueueView {
    std::vector<ReportId> order;

    std::size_t size() const { return order.size(); }
    // True when order is a bijection over {0, ..., n-1}.
    bool is_permutation_of(std::size_t n) const;

    friend bool operator==(const ModqueueView&, const ModqueueView&) = default;
};

// Pick the first candidate with probability p_first, else the second.
struct TopTwo {
    double p_first = 0.6;
    friend bool operator==(const TopTwo&, const TopTwo&) = default;
};

// Pick uniformly over all candidates.
struct Uniform {
    friend bool operator==(const Uniform&, const Uniform&) = default;
};

using SelectionStrategy = std::variant<TopTwo, Uniform>;

struct Moderator {
    ModId id = 0;
    ModqueueView view;
    SelectionStrategy strategy = TopTwo{};
    double awareness = 0.0;           // probability of re-selecting off an under-review pick
    double toxicity_threshold = 0.5;  // a report is toxic to this mod when tox > threshold
};

// Each report is independently toxic (1.0) with probability p_toxic, else 0.0.
struct BernoulliZeroOne {
    double p_toxic = 0.5;
    friend bool operator==(const BernoulliZeroOne&, const BernoulliZeroOne&) = default;
};

struct ExplicitToxicity {
    std::vector<double> values;
    friend bool operator==(const ExplicitToxicity&, const ExplicitToxicity&) = default;
};

using ToxicityModel = std::variant<BernoulliZeroOne, ExplicitToxicity>;

enum class ViewPolicy { Default, Reverse, Random };

std::string to_string(ViewPolicy policy);
ViewPolicy parse_view_policy(const std::string& name);

// Either one length shared by every report, or one length per report.
using ReportLengths = std::variant<int, std::vector<int>>;

// Full declarative description of a sweep. Member defaults are the
// synthetic-baseline values.
struct ExperimentConfig {
    int num_reports = 100;
    ReportLengths report_length = 5;
    std::vector<int> team_sizes = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    int trials = 100;
    std::uint64_t master_seed = 0;
    ViewPolicy view_policy = ViewPolicy::Default;
    bool distribute_toxicity = false;
    double awareness = 0.0;
    SelectionStrategy strategy = TopTwo{0.6};
    ToxicityModel toxicity = BernoulliZeroOne{0.5};
    double toxicity_threshold = 0.5;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ConfigViolation {
    std::string field;
    std::string message;
};

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<ConfigViolation> violations);
    const std::vector<ConfigViolation>& violations() const { return violations_; }

private:
    std::vector<ConfigViolation> violations_;
};

// Every violated invariant, in field order. Empty means the config is valid.
std::vector<ConfigViolation> check_config(const ExperimentConfig& config);

// Returns the config unchanged, or throws ConfigError carrying the full
// violation list.
ExperimentConfig validate_config(ExperimentConfig config);

// Length of report `id` under the config's length rule.
int report_length_of(const ExperimentConfig& config, ReportId id);

// Builds reports 0..N-1. Toxicity is drawn from `rng` one report at a time in
// id order (no draws for the explicit model).
std::vector<Report> make_reports(const ExperimentConfig& config, Rng& rng);

bool is_toxic(const Report& report, double threshold);

}  // namespace modq
