#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "modq/core.hpp"
#include "modq/rng.hpp"

namespace modq {

// Simulation of one trial on a discrete clock.
//
// Tick conventions:
//  - Every timestep visits mods in ascending id order. An idle mod selects a
//    report, a busy mod works one tick on its report.
//  - The selection timestep is the first work tick (progress starts at 1), so
//    one mod finishes a length-L report in exactly L timesteps.
//  - Progress is per mod; a mod that joins a report under review still needs
//    len(r) ticks of its own.
//  - When a mod's progress reaches len(r) the report completes and every other
//    reviewer is released; their ticks on r become redundant time. A released
//    mod that has not had its turn yet this timestep acts as idle in it.
//  - The clock counts executed timesteps. The loop stops when no incomplete
//    report remains at the start of a timestep.

struct Idle {
    friend bool operator==(const Idle&, const Idle&) = default;
};

struct Busy {
    ReportId report = 0;
    int progress = 0;  // ticks accrued by this mod on `report`
    friend bool operator==(const Busy&, const Busy&) = default;
};

using ModStatus = std::variant<Idle, Busy>;

struct ModStats {
    std::int64_t work_time = 0;
    std::int64_t redundant_time = 0;
    std::int64_t reports_seen = 0;
    std::int64_t reports_completed = 0;
    std::int64_t toxic_seen = 0;
    std::int64_t toxic_completed = 0;
    std::int64_t longest_toxic_run = 0;
    std::vector<ReportId> seen_sequence;  // reports this mod began reviewing, in order

    friend bool operator==(const ModStats&, const ModStats&) = default;
};

struct TrialResult {
    std::int64_t completion_time = 0;
    std::int64_t collisions = 0;
    std::vector<ModStats> mods;

    friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

enum class EventKind {
    Start,     // mod began reviewing a free report
    Collide,   // mod began reviewing a report already under review
    Reject,    // awareness made the mod pass over an under-review pick
    Complete,  // mod finished a report
    Release,   // mod was stopped because another mod finished its report
    Wait,      // idle mod found nothing to select
};

std::string_view to_string(EventKind kind);

struct TrialEvent {
    std::int64_t timestep = 0;  // 1-based timestep in which the event happened
    ModId mod = 0;
    EventKind kind = EventKind::Start;
    std::optional<ReportId> report;

    friend bool operator==(const TrialEvent&, const TrialEvent&) = default;
};

using EventSink = std::function<void(const TrialEvent&)>;

struct SimulationState {
    SimulationState(std::vector<Report> reports, std::vector<Moderator> mods);

    std::vector<Report> reports;
    std::vector<Moderator> mods;

    std::int64_t clock = 0;
    std::vector<bool> complete;                // per report
    std::vector<ModStatus> status;             // per mod
    std::vector<std::vector<ModId>> reviewers; // per report, mods currently busy on it
    std::size_t incomplete_count = 0;
    std::int64_t collisions = 0;
    std::vector<ModStats> stats;               // per mod

    EventSink events;  // optional

    bool has_incomplete() const { return incomplete_count > 0; }
    bool under_review_by_other(ReportId report, ModId mod) const;
};

// Runs timesteps until every report is complete. Deterministic in
// (reports, mods, seed). Throws std::invalid_argument on an empty report set,
// an empty team, or a view that is not a permutation of the report ids.
TrialResult run_trial(std::span<const Report> reports, std::span<const Moderator> mods,
                      std::uint64_t seed, EventSink events = {});

// Idle handler: select a report (if any is incomplete) and start on it.
void do_when_idle(ModId mod, SimulationState& state, Rng& rng);

// Busy handler: one tick of work, completing and releasing on the last tick.
void do_when_busy(ModId mod, SimulationState& state);

// Candidates are the incomplete reports in the mod's view order. The strategy
// picks one; if another mod is reviewing it, the pick is passed over with
// probability `awareness` and selection repeats over the remaining candidates.
// Returns nullopt when every candidate was passed over. Exclusions last only
// for this call.
std::optional<ReportId> select_report(ModId mod, SimulationState& state, Rng& rng);

}  // namespace modq
