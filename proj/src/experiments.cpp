#include "modq/experiments.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "modq/config_json.hpp"
#include "modq/views.hpp"

namespace modq {

namespace {

double pct_change(double value, double base) {
    if (base != 0.0) return 100.0 * (value - base) / base;
    return value == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
}

constexpr std::array<std::string_view, 10> kMetrics = {
    "completion_time", "collisions",          "work_time",  "redundant_time",
    "reports_seen",    "reports_completed",   "completed_seen_ratio",
    "toxic_seen",      "toxic_completed",     "longest_toxic_run",
};

Comparison tabulate(std::vector<Setting> settings) {
    Comparison out;
    const auto& base = settings.front().run.summary.cells;
    for (const auto& setting : settings) {
        const auto& cells = setting.run.summary.cells;
        for (auto metric : kMetrics) {
            double sum_value = 0.0;
            double sum_base = 0.0;
            double sum_pct = 0.0;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const double v = cell_metric(cells[c], metric);
                const double b = cell_metric(base[c], metric);
                const double p = pct_change(v, b);
                out.rows.push_back({setting.name, cells[c].team_size, std::string(metric), v, b, p, p});
                sum_value += v;
                sum_base += b;
                sum_pct += p;
            }
            const auto n = static_cast<double>(cells.size());
            out.rows.push_back({setting.name, std::nullopt, std::string(metric), sum_value / n,
                                sum_base / n, sum_pct / n, pct_change(sum_value / n, sum_base / n)});
        }
    }
    out.settings = std::move(settings);
    return out;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, int team_size, int trial) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(team_size),
                       static_cast<std::uint64_t>(trial));
}

std::uint64_t report_seed(std::uint64_t master_seed, int trial) {
    return derive_seed(master_seed, kReportStream, static_cast<std::uint64_t>(trial));
}

ExperimentConfig baseline_preset() {
    ExperimentConfig c;
    c.num_reports = 100;
    c.report_length = 5;
    c.team_sizes = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    c.trials = 100;
    c.master_seed = 0;
    c.view_policy = ViewPolicy::Default;
    c.distribute_toxicity = false;
    c.awareness = 0.0;
    c.strategy = TopTwo{0.6};
    c.toxicity = BernoulliZeroOne{0.5};
    c.toxicity_threshold = 0.5;
    return c;
}

MeanSd mean_sd(std::span<const double> values) {
    if (values.empty()) return {};
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

TrialError::TrialError(int team_size, int trial, const std::string& what)
    : std::runtime_error("team_size=" + std::to_string(team_size) + " trial=" +
                         std::to_string(trial) + ": " + what),
      team_size_(team_size),
      trial_(trial) {}

TrialRecord run_single_trial(const ExperimentConfig& config, int team_size, int trial,
                             bool record_events) {
    TrialRecord rec;
    rec.team_size = team_size;
    rec.trial = trial;
    rec.seed = trial_seed(config.master_seed, team_size, trial);

    Rng report_rng(report_seed(config.master_seed, trial));
    const auto reports = make_reports(config, report_rng);

    Rng view_rng(derive_seed(rec.seed, kViewStream));
    auto views = assign_views(config.view_policy, team_size, reports, config.distribute_toxicity,
                              config.toxicity_threshold, view_rng);

    std::vector<Moderator> mods(static_cast<std::size_t>(team_size));
    for (std::size_t i = 0; i < mods.size(); ++i) {
        mods[i].id = static_cast<ModId>(i);
        mods[i].view = std::move(views[i]);
        mods[i].strategy = config.strategy;
        mods[i].awareness = config.awareness;
        mods[i].toxicity_threshold = config.toxicity_threshold;
    }

    EventSink sink;
    if (record_events) sink = [&rec](const TrialEvent& e) { rec.events.push_back(e); };
    rec.result = run_trial(reports, mods, derive_seed(rec.seed, kSelectionStream), std::move(sink));
    rec.optimal = optimal_values(reports, team_size, config.toxicity_threshold);
    return rec;
}

CellSummary summarize_cell(int team_size, std::span<const TrialRecord> records) {
    CellSummary cell;
    cell.team_size = team_size;
    cell.trials = static_cast<int>(records.size());

    const std::size_t n = records.size();
    std::vector<double> completion(n), collisions(n), work(n), redundant(n), seen(n),
        completed(n), seen_var(n), completed_var(n), toxic_seen(n), toxic_completed(n), runs(n),
        ratio(n), toxic_per_mod(n);

    for (std::size_t t = 0; t < n; ++t) {
        const auto& r = records[t].result;
        const auto k = r.mods.size();
        std::vector<double> w(k), red(k), s(k), c(k), ts(k), tc(k), lr(k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& m = r.mods[i];
            w[i] = static_cast<double>(m.work_time);
            red[i] = static_cast<double>(m.redundant_time);
            s[i] = static_cast<double>(m.reports_seen);
            c[i] = static_cast<double>(m.reports_completed);
            ts[i] = static_cast<double>(m.toxic_seen);
            tc[i] = static_cast<double>(m.toxic_completed);
            lr[i] = static_cast<double>(m.longest_toxic_run);
        }
        completion[t] = static_cast<double>(r.completion_time);
        collisions[t] = static_cast<double>(r.collisions);
        work[t] = team_dispersion(w).mean;
        redundant[t] = team_dispersion(red).mean;
        const auto ds = team_dispersion(s);
        const auto dc = team_dispersion(c);
        seen[t] = ds.mean;
        completed[t] = dc.mean;
        seen_var[t] = ds.variance;
        completed_var[t] = dc.variance;
        toxic_seen[t] = team_dispersion(ts).mean;
        toxic_completed[t] = team_dispersion(tc).mean;
        runs[t] = team_dispersion(lr).mean;
        // Every report is seen by its completer, so sum(seen) >= N >= 1.
        ratio[t] = dc.mean / ds.mean;
        toxic_per_mod[t] = records[t].optimal.toxic_per_mod;
    }

    cell.completion_time = mean_sd(completion);
    cell.collisions = mean_sd(collisions);
    cell.work_time = mean_sd(work);
    cell.redundant_time = mean_sd(redundant);
    cell.reports_seen = mean_sd(seen);
    cell.reports_completed = mean_sd(completed);
    cell.seen_variance = mean_sd(seen_var);
    cell.completed_variance = mean_sd(completed_var);
    cell.toxic_seen = mean_sd(toxic_seen);
    cell.toxic_completed = mean_sd(toxic_completed);
    cell.longest_toxic_run = mean_sd(runs);
    cell.completed_seen_ratio = mean_sd(ratio);
    if (!records.empty()) {
        cell.optimal = records.front().optimal;
        cell.optimal.toxic_per_mod = mean_sd(toxic_per_mod).mean;
    }
    return cell;
}

ExperimentRun run_experiment(const ExperimentConfig& raw, const RunOptions& options) {
    const ExperimentConfig config = validate_config(raw);
    const auto cells = config.team_sizes.size();
    const auto trials = static_cast<std::size_t>(config.trials);
    const std::size_t total = cells * trials;

    std::vector<TrialRecord> records(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t task = next++; task < total; task = next++) {
            const int k = config.team_sizes[task / trials];
            const int t = static_cast<int>(task % trials);
            try {
                records[task] = run_single_trial(config, k, t, options.record_events);
            } catch (const std::exception& e) {
                errors[task] = std::make_exception_ptr(TrialError(k, t, e.what()));
            }
        }
    };

    const auto jobs = static_cast<std::size_t>(std::max(1, options.jobs));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < std::min(jobs, total); ++j) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ExperimentRun run;
    run.summary.config = config;
    run.summary.config_hash = config_hash(config);
    run.summary.master_seed = config.master_seed;
    run.summary.trials = config.trials;
    for (std::size_t c = 0; c < cells; ++c) {
        std::span<const TrialRecord> slice(records.data() + c * trials, trials);
        run.summary.cells.push_back(summarize_cell(config.team_sizes[c], slice));
    }
    run.trials = std::move(records);
    return run;
}

ExperimentConfig ConfigDelta::apply(ExperimentConfig base) const {
    if (view_policy) base.view_policy = *view_policy;
    if (distribute_toxicity) base.distribute_toxicity = *distribute_toxicity;
    if (awareness) base.awareness = *awareness;
    return base;
}

Variant parse_variant(std::string_view text) {
    Variant out{std::string(text), {}};
    if (text.empty()) throw std::invalid_argument("empty variant name");
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find('+', start), text.size());
        const auto part = text.substr(start, end - start);
        if (part == "reverse") {
            out.delta.view_policy = ViewPolicy::Reverse;
        } else if (part == "random") {
            out.delta.view_policy = ViewPolicy::Random;
        } else if (part == "distribute-toxicity") {
            out.delta.distribute_toxicity = true;
        } else if (part.starts_with("awareness=")) {
            const auto text = part.substr(std::string_view("awareness=").size());
            double level = 0.0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), level);
            if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
                throw std::invalid_argument("bad awareness value in variant '" + std::string(text) + "'");
            if (!(level >= 0.0 && level <= 1.0))
                throw std::invalid_argument("awareness must lie in [0,1] (variant '" + std::string(text) + "')");
            out.delta.awareness = level;
        } else {
            throw std::invalid_argument("unknown variant '" + std::string(part) + "'");
        }
        start = end + 1;
    }
    return out;
}

std::span<const std::string_view> comparison_metrics() { return kMetrics; }

double cell_metric(const CellSummary& cell, std::string_view metric) {
    if (metric == "completion_time") return cell.completion_time.mean;
    if (metric == "collisions") return cell.collisions.mean;
    if (metric == "work_time") return cell.work_time.mean;
    if (metric == "redundant_time") return cell.redundant_time.mean;
    if (metric == "reports_seen") return cell.reports_seen.mean;
    if (metric == "reports_completed") return cell.reports_completed.mean;
    if (metric == "completed_seen_ratio") return cell.completed_seen_ratio.mean;
    if (metric == "toxic_seen") return cell.toxic_seen.mean;
    if (metric == "toxic_completed") return cell.toxic_completed.mean;
    if (metric == "longest_toxic_run") return cell.longest_toxic_run.mean;
    throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
}

const ComparisonRow& Comparison::overall(std::string_view setting, std::string_view metric) const {
    for (const auto& row : rows) {
        if (!row.team_size && row.setting == setting && row.metric == metric) return row;
    }
    throw std::out_of_range("no aggregate row for " + std::string(setting) + "/" + std::string(metric));
}

const ComparisonRow& Comparison::at(std::string_view setting, int team_size,
                                    std::string_view metric) const {
    for (const auto& row : rows) {
        if (row.team_size == team_size && row.setting == setting && row.metric == metric) return row;
    }
    throw std::out_of_range("no row for " + std::string(setting) + "/" + std::to_string(team_size) +
                            "/" + std::string(metric));
}

Comparison compare_interventions(const ExperimentConfig& base, std::span<const Variant> variants,
                                 const RunOptions& options) {
    std::vector<ExperimentConfig> configs{validate_config(base)};
    for (const auto& v : variants) configs.push_back(validate_config(v.delta.apply(base)));

    std::vector<Setting> settings;
    settings.push_back({std::string(kBaseSetting), run_experiment(configs[0], options)});
    for (std::size_t i = 0; i < variants.size(); ++i)
        settings.push_back({variants[i].name, run_experiment(configs[i + 1], options)});
    return tabulate(std::move(settings));
}

Comparison sweep_awareness(const ExperimentConfig& base, std::span<const double> levels,
                           const RunOptions& options) {
    std::vector<Variant> variants;
    for (double level : levels) {
        if (!(level >= 0.0 && level <= 1.0))
            throw std::invalid_argument("awareness level " + format_level(level) + " outside [0,1]");
        Variant v;
        v.name = "awareness=" + format_level(level);
        v.delta.awareness = level;
        variants.push_back(std::move(v));
    }
    return compare_interventions(base, variants, options);
}

std::string format_level(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return ec == std::errc{} ? std::string(buf.data(), ptr) : std::string("nan");
}

}  // namespace modq
