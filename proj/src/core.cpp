#include "modq/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace modq {

namespace {

bool in_unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

std::string join_violations(const std::vector<ConfigViolation>& violations) {
    std::ostringstream out;
    out << "invalid config:";
    for (const auto& v : violations) out << "\n  " << v.field << ": " << v.message;
    return out.str();
}

}  // namespace

bool ModqueueView::is_permutation_of(std::size_t n) const {
    if (order.size() != n) return false;
    std::vector<bool> hit(n, false);
    for (ReportId id : order) {
        if (id >= n || hit[id]) return false;
        hit[id] = true;
    }
    return true;
}

std::string to_string(ViewPolicy policy) {
    switch (policy) {
        case ViewPolicy::Default: return "default";
        case ViewPolicy::Reverse: return "reverse";
        case ViewPolicy::Random: return "random";
    }
    return "default";
}

ViewPolicy parse_view_policy(const std::string& name) {
    if (name == "default") return ViewPolicy::Default;
    if (name == "reverse") return ViewPolicy::Reverse;
    if (name == "random") return ViewPolicy::Random;
    throw std::invalid_argument("unknown view policy '" + name + "'");
}

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

std::vector<ConfigViolation> check_config(const ExperimentConfig& config) {
    std::vector<ConfigViolation> out;
    auto fail = [&out](std::string field, std::string message) {
        out.push_back({std::move(field), std::move(message)});
    };

    if (config.num_reports < 1) fail("num_reports", "num_reports must be at least 1");

    if (const int* uniform = std::get_if<int>(&config.report_length)) {
        if (*uniform < 1) fail("report_length", "report_length must be at least 1");
    } else {
        const auto& lengths = std::get<std::vector<int>>(config.report_length);
        if (std::cmp_not_equal(lengths.size(), config.num_reports))
            fail("report_length", "report_length list must have num_reports entries");
        if (std::any_of(lengths.begin(), lengths.end(), [](int l) { return l < 1; }))
            fail("report_length", "every report_length must be at least 1");
    }

    if (config.team_sizes.empty()) fail("team_sizes", "team_sizes must be nonempty");
    if (std::any_of(config.team_sizes.begin(), config.team_sizes.end(), [](int k) { return k < 1; }))
        fail("team_sizes", "every team size must be at least 1");

    if (config.trials < 1) fail("trials", "trials must be at least 1");

    if (!in_unit_interval(config.awareness)) fail("awareness", "awareness must lie in [0,1]");

    if (const auto* top = std::get_if<TopTwo>(&config.strategy)) {
        if (!in_unit_interval(top->p_first)) fail("strategy", "p_first must lie in [0,1]");
    }

    if (const auto* bern = std::get_if<BernoulliZeroOne>(&config.toxicity)) {
        if (!in_unit_interval(bern->p_toxic)) fail("toxicity", "p_toxic must lie in [0,1]");
    } else {
        const auto& values = std::get<ExplicitToxicity>(config.toxicity).values;
        if (std::cmp_not_equal(values.size(), config.num_reports))
            fail("toxicity", "explicit toxicity values must have num_reports entries");
        if (!std::all_of(values.begin(), values.end(), in_unit_interval))
            fail("toxicity", "every toxicity value must lie in [0,1]");
    }

    if (!in_unit_interval(config.toxicity_threshold))
        fail("toxicity_threshold", "toxicity_threshold must lie in [0,1]");

    return out;
}

ExperimentConfig validate_config(ExperimentConfig config) {
    auto violations = check_config(config);
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return config;
}

int report_length_of(const ExperimentConfig& config, ReportId id) {
    if (const int* uniform = std::get_if<int>(&config.report_length)) return *uniform;
    return std::get<std::vector<int>>(config.report_length).at(id);
}

std::vector<Report> make_reports(const ExperimentConfig& config, Rng& rng) {
    const auto n = static_cast<std::size_t>(config.num_reports);
    std::vector<Report> reports(n);
    const auto* bern = std::get_if<BernoulliZeroOne>(&config.toxicity);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = reports[i];
        r.id = static_cast<ReportId>(i);
        r.length = report_length_of(config, r.id);
        r.toxicity = bern ? (rng.bernoulli(bern->p_toxic) ? 1.0 : 0.0)
                          : std::get<ExplicitToxicity>(config.toxicity).values[i];
    }
    return reports;
}

bool is_toxic(const Report& report, double threshold) { return report.toxicity > threshold; }

}  // namespace modq
