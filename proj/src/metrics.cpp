#include "modq/metrics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

namespace modq {

OptimalValues optimal_values(std::span<const Report> reports, int k, double tau) {
    if (k < 1) throw std::invalid_argument("optimal_values: team size must be at least 1");

    std::vector<std::int64_t> lengths;
    lengths.reserve(reports.size());
    std::int64_t total = 0;
    std::int64_t toxic = 0;
    for (const auto& r : reports) {
        lengths.push_back(r.length);
        total += r.length;
        if (is_toxic(r, tau)) ++toxic;
    }

    // LPT: hand the longest remaining report to the least-loaded mod.
    std::sort(lengths.begin(), lengths.end(), std::greater<>());
    std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>> loads;
    for (int i = 0; i < k; ++i) loads.push(0);
    for (auto len : lengths) {
        const auto least = loads.top();
        loads.pop();
        loads.push(least + len);
    }
    std::int64_t makespan = 0;
    while (!loads.empty()) {
        makespan = std::max(makespan, loads.top());
        loads.pop();
    }

    const auto kd = static_cast<double>(k);
    OptimalValues out;
    out.completion_time_lower_bound = static_cast<double>(total) / kd;
    out.completion_time_achievable = makespan;
    out.reports_per_mod = static_cast<double>(reports.size()) / kd;
    out.toxic_per_mod = static_cast<double>(toxic) / kd;
    out.collisions = 0;
    return out;
}

std::int64_t longest_toxic_run(std::span<const ReportId> seen, std::span<const Report> reports,
                               double tau) {
    std::int64_t best = 0;
    std::int64_t run = 0;
    for (ReportId id : seen) {
        run = is_toxic(reports[id], tau) ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

Dispersion team_dispersion(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("team_dispersion: no values");
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, ss / n};
}

double percent_vs_optimal(double observed, double optimal) {
    if (!(optimal > 0.0)) throw std::invalid_argument("percent_vs_optimal: optimal must be positive");
    return observed / optimal;
}

}  // namespace modq
