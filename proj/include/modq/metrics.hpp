#pragma once

#include <cstdint>
#include <span>

#include "modq/core.hpp"

namespace modq {

// Reference values for a report set and team size.
struct OptimalValues {
    double completion_time_lower_bound = 0.0;  // sum(len) / k
    std::int64_t completion_time_achievable = 0;  // makespan of an explicit schedule
    double reports_per_mod = 0.0;              // N / k
    double toxic_per_mod = 0.0;                // toxic count / k
    std::int64_t collisions = 0;               // always 0
};

// `completion_time_achievable` is the makespan of longest-first list
// scheduling over the report lengths. For uniform lengths L this is exactly
// L * ceil(N / k), the true optimum; otherwise it is an achievable upper bound.
OptimalValues optimal_values(std::span<const Report> reports, int k, double tau);

// Longest streak of consecutive toxic reports in `seen`. 0 when none.
std::int64_t longest_toxic_run(std::span<const ReportId> seen, std::span<const Report> reports,
                               double tau);

struct Dispersion {
    double mean = 0.0;
    double variance = 0.0;  // population variance (divides by the count)
};

// Throws std::invalid_argument on empty input.
Dispersion team_dispersion(std::span<const double> values);

// observed / optimal. Throws std::invalid_argument when optimal <= 0.
double percent_vs_optimal(double observed, double optimal);

}  // namespace modq
