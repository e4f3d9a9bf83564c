// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "modq/experiments.hpp"
#include "modq/views.hpp"
#include "support/branch_oracle.hpp"

using namespace modq;

namespace {

// Tolerances.
constexpr int kOracleTrials = 20000;
constexpr double kSigmas = 3.0;
constexpr double kFirstStepCollision = 0.52;  // 0.6^2 + 0.4^2
constexpr double kRatioLo = 2.0, kRatioHi = 3.5;
constexpr double kTimeK10Lo = 160.0, kTimeK10Hi = 260.0;
constexpr double kIncrementLo = 30.0, kIncrementHi = 85.0;
constexpr double kRandomCollisionCut = 45.0, kRandomTimeCut = 40.0;
constexpr double kReverseCollisionCut = 35.0, kReverseTimeCut = 25.0;
constexpr double kMonotoneSlack = 0.02;
constexpr double kAwarenessCollisionCut = 10.0, kAwarenessTimeCut = 5.0;
constexpr double kDoneRatioK10Lo = 0.10, kDoneRatioK10Hi = 0.25;
constexpr double kToxicRunLo = 3.5, kToxicRunHi = 7.0;
constexpr int kPropertyConfigs = 500;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double average_metric(const ExperimentRun& run, std::string_view metric) {
    double sum = 0.0;
    for (const auto& cell : run.summary.cells) sum += cell_metric(cell, metric);
    return sum / static_cast<double>(run.summary.cells.size());
}

const ExperimentRun& setting(const Comparison& cmp, std::string_view name) {
    for (const auto& s : cmp.settings)
        if (s.name == name) return s.run;
    throw std::out_of_range("no setting " + std::string(name));
}

Outcome zero_collision_optimum() {
    Outcome o;
    auto c = baseline_preset();
    c.awareness = 1.0;
    const auto run = run_experiment(c, {jobs(), false});
    int violations = 0;
    for (const auto& t : run.trials) {
        const int k = t.team_size;
        bool ok = t.result.collisions == 0 &&
                  t.result.completion_time == 5 * ((c.num_reports + k - 1) / k);
        for (const auto& m : t.result.mods)
            ok = ok && m.redundant_time == 0 && m.reports_seen == m.reports_completed;
        if (!ok) ++violations;
    }
    o.detail << run.trials.size() << " trials, " << violations << " violations";
    o.require(violations == 0, "every trial optimal");
    o.require(run.trials.size() == 900, "9 sizes x 100 trials");
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    const auto exact = oracle::enumerate({{5, 5}, {{0, 1}, {0, 1}}, 0.6, 0.0});

    auto c = baseline_preset();
    c.num_reports = 2;
    c.team_sizes = {2};
    c.trials = kOracleTrials;
    c.master_seed = 20240923;
    const auto run = run_experiment(c, {jobs(), true});

    std::vector<double> times, collisions;
    int first_step = 0;
    for (const auto& t : run.trials) {
        times.push_back(static_cast<double>(t.result.completion_time));
        collisions.push_back(static_cast<double>(t.result.collisions));
        first_step += std::any_of(t.events.begin(), t.events.end(), [](const TrialEvent& e) {
            return e.timestep == 1 && e.kind == EventKind::Collide;
        });
    }
    const double n = static_cast<double>(run.trials.size());
    const auto ct = mean_sd(times);
    const auto cc = mean_sd(collisions);
    const double se_t = ct.sd / std::sqrt(n);
    const double se_c = cc.sd / std::sqrt(n);
    const double frac = first_step / n;
    const double se_f = std::sqrt(kFirstStepCollision * (1 - kFirstStepCollision) / n);

    o.detail << run.trials.size() << " trials; time " << ct.mean << " vs " << exact.completion_time
             << " (se " << se_t << "); collisions " << cc.mean << " vs " << exact.collisions
             << " (se " << se_c << "); first-step collision rate " << frac << " vs "
             << kFirstStepCollision << " (se " << se_f << ")";
    o.require(std::abs(exact.completion_time - 7.08) < 1e-9, "oracle time 7.08");
    o.require(std::abs(ct.mean - exact.completion_time) <= kSigmas * se_t, "time within 3 se");
    o.require(std::abs(cc.mean - exact.collisions) <= kSigmas * se_c, "collisions within 3 se");
    o.require(std::abs(frac - kFirstStepCollision) <= kSigmas * se_f, "first-step rate within 3 se");
    return o;
}

Outcome baseline_shape(const ExperimentRun& base) {
    Outcome o;
    const auto& cells = base.summary.cells;
    double ratio = 0.0;
    for (const auto& cell : cells)
        ratio += cell.completion_time.mean / cell.optimal.completion_time_lower_bound;
    ratio /= static_cast<double>(cells.size());

    bool increasing = true;
    for (std::size_t i = 1; i < cells.size(); ++i)
        increasing = increasing && cells[i].collisions.mean > cells[i - 1].collisions.mean;
    const double increment = (cells.back().collisions.mean - cells.front().collisions.mean) /
                             (cells.back().team_size - cells.front().team_size);
    const double t10 = cells.back().completion_time.mean;

    o.detail << "time/optimal " << ratio << ", time at k=10 " << t10
             << ", collisions per added mod " << increment;
    o.require(cells.front().team_size == 2 && cells.back().team_size == 10, "k = 2..10");
    o.require(ratio >= kRatioLo && ratio <= kRatioHi, "ratio in [2.0, 3.5]");
    o.require(t10 >= kTimeK10Lo && t10 <= kTimeK10Hi, "k=10 time in [160, 260]");
    o.require(increasing, "collisions strictly increasing in k");
    o.require(increment >= kIncrementLo && increment <= kIncrementHi, "increment in [30, 85]");
    return o;
}

Outcome view_interventions(const Comparison& cmp) {
    Outcome o;
    const double rnd_c = -cmp.overall("random", "collisions").pct_change;
    const double rnd_t = -cmp.overall("random", "completion_time").pct_change;
    const double rev_c = -cmp.overall("reverse", "collisions").pct_change;
    const double rev_t = -cmp.overall("reverse", "completion_time").pct_change;
    o.detail << "random cuts collisions " << rnd_c << "%, time " << rnd_t
             << "%; reverse cuts collisions " << rev_c << "%, time " << rev_t << "%";
    o.require(rnd_c >= kRandomCollisionCut, "random collisions >= 45%");
    o.require(rnd_t >= kRandomTimeCut, "random time >= 40%");
    o.require(rev_c >= kReverseCollisionCut, "reverse collisions >= 35%");
    o.require(rev_t >= kReverseTimeCut, "reverse time >= 25%");
    o.require(rnd_c > rev_c && rnd_t > rev_t, "random beats reverse");
    return o;
}

const std::vector<double> kLevels{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

std::string level_name(double rho) { return "awareness=" + format_level(rho); }

Outcome awareness_dose_response(const Comparison& sweep) {
    Outcome o;
    bool monotone = true;
    o.detail << "collisions/time by rho:";
    for (std::size_t i = 0; i < kLevels.size(); ++i) {
        const auto& run = setting(sweep, level_name(kLevels[i]));
        const double c = average_metric(run, "collisions");
        const double t = average_metric(run, "completion_time");
        o.detail << " " << format_level(kLevels[i]) << ":" << c << "/" << t;
        if (i == 0) continue;
        const auto& prev = setting(sweep, level_name(kLevels[i - 1]));
        monotone = monotone && c <= average_metric(prev, "collisions") * (1 + kMonotoneSlack) &&
                   t <= average_metric(prev, "completion_time") * (1 + kMonotoneSlack);
    }
    const auto& r0 = setting(sweep, level_name(0.0));
    const auto& r2 = setting(sweep, level_name(0.2));
    double cut_c = 0.0, cut_t = 0.0;
    for (std::size_t i = 0; i < r0.summary.cells.size(); ++i) {
        const auto& a = r0.summary.cells[i];
        const auto& b = r2.summary.cells[i];
        cut_c += 100 * (a.collisions.mean - b.collisions.mean) / a.collisions.mean;
        cut_t += 100 * (a.completion_time.mean - b.completion_time.mean) / a.completion_time.mean;
    }
    cut_c /= static_cast<double>(r0.summary.cells.size());
    cut_t /= static_cast<double>(r0.summary.cells.size());
    o.detail << "; rho 0.2 vs 0 cuts collisions " << cut_c << "%, time " << cut_t << "%";
    o.require(monotone, "non-increasing within 2%");
    o.require(cut_c >= kAwarenessCollisionCut, "rho 0.2 collisions >= 10%");
    o.require(cut_t >= kAwarenessTimeCut, "rho 0.2 time >= 5%");
    return o;
}

Outcome workload_ratios(const Comparison& sweep, const ExperimentRun& base) {
    Outcome o;
    bool increasing = true;
    double prev = -1.0;
    o.detail << "completed/seen by rho:";
    for (double rho : kLevels) {
        const double v = average_metric(setting(sweep, level_name(rho)), "completed_seen_ratio");
        o.detail << " " << format_level(rho) << ":" << 100 * v << "%";
        increasing = increasing && v > prev;
        prev = v;
    }
    bool exact_at_one = true;
    for (const auto& cell : setting(sweep, level_name(1.0)).summary.cells)
        exact_at_one = exact_at_one && cell.completed_seen_ratio.mean == 1.0 &&
                       cell.completed_seen_ratio.sd == 0.0;
    const double k10 = base.summary.cells.back().completed_seen_ratio.mean;
    o.detail << "; baseline k=10 " << 100 * k10 << "%";
    o.require(increasing, "strictly increasing in rho");
    o.require(exact_at_one, "exactly 100% at rho=1");
    o.require(k10 >= kDoneRatioK10Lo && k10 <= kDoneRatioK10Hi, "k=10 in [10%, 25%]");
    return o;
}

Outcome conservation_invariants() {
    Outcome o;
    Rng g(0xacce97a9ceULL);
    int trial_failures = 0, view_failures = 0;
    for (int iter = 0; iter < kPropertyConfigs; ++iter) {
        auto c = baseline_preset();
        c.num_reports = 1 + static_cast<int>(g.below(60));
        if (g.bernoulli(0.5)) {
            c.report_length = 1 + static_cast<int>(g.below(8));
        } else {
            std::vector<int> lengths(static_cast<std::size_t>(c.num_reports));
            for (auto& l : lengths) l = 1 + static_cast<int>(g.below(8));
            c.report_length = lengths;
        }
        const int k = 1 + static_cast<int>(g.below(12));
        c.team_sizes = {k};
        c.trials = 1;
        c.master_seed = g.next_u64();
        c.view_policy = static_cast<ViewPolicy>(g.below(3));
        c.distribute_toxicity = g.bernoulli(0.5);
        c.awareness = g.bernoulli(0.25) ? 1.0 : g.uniform();
        if (g.bernoulli(0.5)) c.strategy = TopTwo{g.uniform()};
        else c.strategy = Uniform{};
        c.toxicity = BernoulliZeroOne{g.uniform()};

        const auto rec = run_single_trial(c, k, 0);
        std::int64_t completed = 0;
        bool ok = true;
        for (const auto& m : rec.result.mods) {
            completed += m.reports_completed;
            ok = ok && m.reports_completed <= m.reports_seen && m.redundant_time <= m.work_time;
        }
        if (!ok || completed != c.num_reports) ++trial_failures;

        Rng rr(report_seed(c.master_seed, 0));
        const auto reports = make_reports(c, rr);
        Rng vr(g.next_u64());
        const auto n = static_cast<std::size_t>(c.num_reports);
        for (const auto& view :
             assign_views(c.view_policy, k, reports, c.distribute_toxicity, c.toxicity_threshold, vr)) {
            const auto once = distribute_toxicity(view, reports, c.toxicity_threshold);
            auto only = [&](const ModqueueView& v, bool toxic) {
                std::vector<ReportId> out;
                for (auto id : v.order)
                    if (is_toxic(reports[id], c.toxicity_threshold) == toxic) out.push_back(id);
                return out;
            };
            const bool good = view.is_permutation_of(n) && once.is_permutation_of(n) &&
                              distribute_toxicity(once, reports, c.toxicity_threshold) == once &&
                              only(once, true) == only(view, true) &&
                              only(once, false) == only(view, false);
            if (!good) ++view_failures;
        }
    }
    o.detail << kPropertyConfigs << " random configs; " << trial_failures << " trial and "
             << view_failures << " view violations";
    o.require(trial_failures == 0, "trial conservation");
    o.require(view_failures == 0, "view properties");
    return o;
}

Outcome toxic_runs(const ExperimentRun& base) {
    Outcome o;
    const double mean_run = average_metric(base, "longest_toxic_run");
    o.detail << "baseline longest toxic run " << mean_run << ";";

    auto c = baseline_preset();
    c.team_sizes = {2, 3, 4};
    const std::vector<Variant> variants{parse_variant("awareness=1"),
                                        parse_variant("distribute-toxicity+awareness=1")};
    const auto cmp = compare_interventions(c, variants, {jobs(), false});
    bool worse = true;
    for (int k : c.team_sizes) {
        const double plain = cmp.at("awareness=1", k, "longest_toxic_run").mean;
        const double dt = cmp.at("distribute-toxicity+awareness=1", k, "longest_toxic_run").mean;
        o.detail << " k=" << k << " " << dt << " vs " << plain;
        worse = worse && dt > plain;
    }
    o.require(mean_run >= kToxicRunLo && mean_run <= kToxicRunHi, "baseline run in [3.5, 7.0]");
    o.require(worse, "distribute-toxicity + rho=1 longer at every k in 2..4");
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](const char* name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
        std::fflush(stdout);
        failures += !o.pass;
    };

    const auto base_config = baseline_preset();
    const std::vector<Variant> views{parse_variant("reverse"), parse_variant("random")};
    const auto view_cmp = compare_interventions(base_config, views, {jobs(), false});
    const auto& base = setting(view_cmp, kBaseSetting);
    const auto sweep = sweep_awareness(base_config, kLevels, {jobs(), false});

    report("zero-collision optimum", zero_collision_optimum);
    report("oracle equivalence", oracle_equivalence);
    report("baseline inefficiency shape", [&] { return baseline_shape(base); });
    report("view interventions", [&] { return view_interventions(view_cmp); });
    report("awareness dose response", [&] { return awareness_dose_response(sweep); });
    report("workload ratios", [&] { return workload_ratios(sweep, base); });
    report("conservation invariants", conservation_invariants);
    report("toxic runs", [&] { return toxic_runs(base); });

    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
