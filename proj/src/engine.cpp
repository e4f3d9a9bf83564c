#include "modq/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "modq/metrics.hpp"

namespace modq {

namespace {

void emit(SimulationState& state, ModId mod, EventKind kind, std::optional<ReportId> report) {
    if (state.events) state.events(TrialEvent{state.clock + 1, mod, kind, report});
}

// Position within `count` candidates chosen by the strategy. Always consumes
// exactly one draw so the stream layout does not depend on the queue state.
std::size_t pick_position(const SelectionStrategy& strategy, std::size_t count, Rng& rng) {
    if (const auto* top = std::get_if<TopTwo>(&strategy)) {
        const bool first = rng.bernoulli(top->p_first);
        return (first || count == 1) ? 0 : 1;
    }
    return static_cast<std::size_t>(rng.below(count));
}

void complete_report(ModId mod, ReportId report, SimulationState& state) {
    const auto& r = state.reports[report];
    const double tau = state.mods[mod].toxicity_threshold;
    state.complete[report] = true;
    --state.incomplete_count;

    auto& own = state.stats[mod];
    ++own.reports_completed;
    if (is_toxic(r, tau)) ++own.toxic_completed;
    state.status[mod] = Idle{};
    emit(state, mod, EventKind::Complete, report);

    for (ModId other : state.reviewers[report]) {
        if (other == mod) continue;
        const auto& busy = std::get<Busy>(state.status[other]);
        state.stats[other].redundant_time += busy.progress;
        state.status[other] = Idle{};
        emit(state, other, EventKind::Release, report);
    }
    state.reviewers[report].clear();
}

}  // namespace

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Start: return "start";
        case EventKind::Collide: return "collide";
        case EventKind::Reject: return "reject";
        case EventKind::Complete: return "complete";
        case EventKind::Release: return "release";
        case EventKind::Wait: return "wait";
    }
    return "unknown";
}

SimulationState::SimulationState(std::vector<Report> reports_in, std::vector<Moderator> mods_in)
    : reports(std::move(reports_in)),
      mods(std::move(mods_in)),
      complete(reports.size(), false),
      status(mods.size(), Idle{}),
      reviewers(reports.size()),
      incomplete_count(reports.size()),
      stats(mods.size()) {}

bool SimulationState::under_review_by_other(ReportId report, ModId mod) const {
    const auto& who = reviewers[report];
    return std::any_of(who.begin(), who.end(), [mod](ModId m) { return m != mod; });
}

std::optional<ReportId> select_report(ModId mod, SimulationState& state, Rng& rng) {
    const Moderator& m = state.mods[mod];
    std::vector<ReportId> candidates;
    candidates.reserve(state.incomplete_count);
    for (ReportId id : m.view.order) {
        if (!state.complete[id]) candidates.push_back(id);
    }

    while (!candidates.empty()) {
        const auto pos = pick_position(m.strategy, candidates.size(), rng);
        const ReportId pick = candidates[pos];
        if (state.under_review_by_other(pick, mod) && rng.bernoulli(m.awareness)) {
            emit(state, mod, EventKind::Reject, pick);
            candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pos));
            continue;
        }
        return pick;
    }
    return std::nullopt;
}

void do_when_idle(ModId mod, SimulationState& state, Rng& rng) {
    if (!state.has_incomplete()) return;
    const auto pick = select_report(mod, state, rng);
    if (!pick) {
        emit(state, mod, EventKind::Wait, std::nullopt);
        return;
    }

    const ReportId report = *pick;
    const bool collision = !state.reviewers[report].empty();
    if (collision) ++state.collisions;

    auto& s = state.stats[mod];
    ++s.work_time;
    ++s.reports_seen;
    if (is_toxic(state.reports[report], state.mods[mod].toxicity_threshold)) ++s.toxic_seen;
    s.seen_sequence.push_back(report);

    state.status[mod] = Busy{report, 1};
    state.reviewers[report].push_back(mod);
    emit(state, mod, collision ? EventKind::Collide : EventKind::Start, report);

    if (state.reports[report].length <= 1) complete_report(mod, report, state);
}

void do_when_busy(ModId mod, SimulationState& state) {
    auto& busy = std::get<Busy>(state.status[mod]);
    ++busy.progress;
    ++state.stats[mod].work_time;
    if (busy.progress >= state.reports[busy.report].length) complete_report(mod, busy.report, state);
}

TrialResult run_trial(std::span<const Report> reports, std::span<const Moderator> mods,
                      std::uint64_t seed, EventSink events) {
    if (reports.empty()) throw std::invalid_argument("run_trial: report set is empty");
    if (mods.empty()) throw std::invalid_argument("run_trial: moderator team is empty");
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (reports[i].id != i) throw std::invalid_argument("run_trial: report ids must be 0..N-1");
        if (reports[i].length < 1) throw std::invalid_argument("run_trial: report length must be >= 1");
    }
    for (const auto& m : mods) {
        if (!m.view.is_permutation_of(reports.size()))
            throw std::invalid_argument("run_trial: view of mod " + std::to_string(m.id) +
                                        " is not a permutation of the report ids");
    }

    SimulationState state({reports.begin(), reports.end()}, {mods.begin(), mods.end()});
    state.events = std::move(events);
    Rng rng(seed);

    const auto k = static_cast<ModId>(state.mods.size());
    while (state.has_incomplete()) {
        for (ModId i = 0; i < k; ++i) {
            if (std::holds_alternative<Idle>(state.status[i])) do_when_idle(i, state, rng);
            else do_when_busy(i, state);
        }
        ++state.clock;
    }

    TrialResult result;
    result.completion_time = state.clock;
    result.collisions = state.collisions;
    result.mods = std::move(state.stats);
    for (ModId i = 0; i < k; ++i) {
        auto& s = result.mods[i];
        s.longest_toxic_run =
            longest_toxic_run(s.seen_sequence, state.reports, state.mods[i].toxicity_threshold);
    }
    return result;
}

}  // namespace modq
