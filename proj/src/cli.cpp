#include "modq/cli.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "modq/config_json.hpp"

namespace modq::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

json mean_sd_json(const MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

json optimal_json(const OptimalValues& o) {
    return {{"completion_time_lower_bound", o.completion_time_lower_bound},
            {"completion_time_achievable", o.completion_time_achievable},
            {"reports_per_mod", o.reports_per_mod},
            {"toxic_per_mod", o.toxic_per_mod},
            {"collisions", o.collisions}};
}

class OutputError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw OutputError("cannot open " + path.string() + " for writing");
    f << bytes;
    f.close();
    if (!f) throw OutputError("failed writing " + path.string());
}

void prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw OutputError("cannot create output directory " + dir.string() +
                          (ec ? ": " + ec.message() : ""));
}

template <typename Fn>
std::string render(Fn&& fn) {
    std::ostringstream s;
    fn(s);
    return s.str();
}

// Loads, applies CLI overrides, validates. Returns nullopt after printing
// the problem.
std::optional<ExperimentConfig> resolve_config(const std::filesystem::path& path,
                                               const Options& options, std::ostream& err) {
    ExperimentConfig config;
    try {
        config = load_config(path);
    } catch (const json::parse_error& e) {
        err << "error: malformed JSON in " << path.string() << ": " << e.what() << '\n';
        return std::nullopt;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return std::nullopt;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return std::nullopt;
    }
    if (options.seed) config.master_seed = *options.seed;
    if (options.trials) config.trials = *options.trials;
    const auto violations = check_config(config);
    if (!violations.empty()) {
        err << "error: invalid config " << path.string() << '\n';
        for (const auto& v : violations) err << "  " << v.field << ": " << v.message << '\n';
        return std::nullopt;
    }
    return config;
}

int write_run_outputs(const Options& options, std::span<const NamedRun> runs, const json& summary,
                      const Comparison* comparison, std::ostream& err) {
    try {
        prepare_dir(options.output);
        write_file(options.output / "summary.json", summary.dump(2) + "\n");
        write_file(options.output / "trials.csv", render([&](std::ostream& s) { write_trials_csv(s, runs); }));
        write_file(options.output / "mods.csv", render([&](std::ostream& s) { write_mods_csv(s, runs); }));
        if (comparison) {
            write_file(options.output / "comparison.csv",
                       render([&](std::ostream& s) { write_comparison_csv(s, *comparison); }));
        }
        if (options.events) {
            write_file(options.output / "events.jsonl",
                       render([&](std::ostream& s) { write_events_jsonl(s, runs); }));
        }
    } catch (const OutputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

int run_single(const std::string& setting, const ExperimentConfig& config, const Options& options,
               std::ostream& out, std::ostream& err) {
    const auto run = run_experiment(config, {options.jobs, options.events});
    const std::array<NamedRun, 1> runs{NamedRun{setting, &run}};
    const int rc = write_run_outputs(options, runs, summary_to_json(setting, run.summary), nullptr, err);
    if (rc == kExitOk) print_table(out, setting, run.summary);
    return rc;
}

}  // namespace

void write_trials_csv(std::ostream& out, std::span<const NamedRun> runs) {
    out << "schema_version,setting,team_size,trial,seed,completion_time,collisions,optimal_lb,"
           "optimal_achievable\n";
    for (const auto& nr : runs) {
        for (const auto& t : nr.run->trials) {
            out << kSchemaVersion << ',' << nr.setting << ',' << t.team_size << ',' << t.trial << ','
                << t.seed << ',' << t.result.completion_time << ',' << t.result.collisions << ','
                << num(t.optimal.completion_time_lower_bound) << ','
                << t.optimal.completion_time_achievable << '\n';
        }
    }
}

void write_mods_csv(std::ostream& out, std::span<const NamedRun> runs) {
    out << "schema_version,setting,team_size,trial,mod_id,work_time,redundant_time,reports_seen,"
           "reports_completed,toxic_seen,toxic_completed,longest_toxic_run\n";
    for (const auto& nr : runs) {
        for (const auto& t : nr.run->trials) {
            for (std::size_t i = 0; i < t.result.mods.size(); ++i) {
                const auto& m = t.result.mods[i];
                out << kSchemaVersion << ',' << nr.setting << ',' << t.team_size << ',' << t.trial
                    << ',' << i << ',' << m.work_time << ',' << m.redundant_time << ','
                    << m.reports_seen << ',' << m.reports_completed << ',' << m.toxic_seen << ','
                    << m.toxic_completed << ',' << m.longest_toxic_run << '\n';
            }
        }
    }
}

void write_comparison_csv(std::ostream& out, const Comparison& comparison) {
    out << "schema_version,setting,team_size,metric,mean,base_mean,pct_change,pct_change_of_means\n";
    for (const auto& r : comparison.rows) {
        out << kSchemaVersion << ',' << r.setting << ','
            << (r.team_size ? std::to_string(*r.team_size) : std::string("all")) << ',' << r.metric
            << ',' << num(r.mean) << ',' << num(r.base_mean) << ',' << num(r.pct_change) << ','
            << num(r.pct_change_of_means) << '\n';
    }
}

void write_events_jsonl(std::ostream& out, std::span<const NamedRun> runs) {
    for (const auto& nr : runs) {
        for (const auto& t : nr.run->trials) {
            for (const auto& e : t.events) {
                json line = {{"setting", nr.setting},
                             {"team_size", t.team_size},
                             {"trial", t.trial},
                             {"timestep", e.timestep},
                             {"mod", e.mod},
                             {"action", std::string(to_string(e.kind))},
                             {"report", e.report ? json(*e.report) : json(nullptr)}};
                out << line.dump() << '\n';
            }
        }
    }
}

json summary_to_json(const std::string& setting, const ExperimentSummary& summary) {
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << summary.config_hash;

    json cells = json::array();
    for (const auto& c : summary.cells) {
        cells.push_back({{"team_size", c.team_size},
                         {"trials", c.trials},
                         {"completion_time", mean_sd_json(c.completion_time)},
                         {"collisions", mean_sd_json(c.collisions)},
                         {"work_time", mean_sd_json(c.work_time)},
                         {"redundant_time", mean_sd_json(c.redundant_time)},
                         {"reports_seen", mean_sd_json(c.reports_seen)},
                         {"reports_completed", mean_sd_json(c.reports_completed)},
                         {"seen_variance", mean_sd_json(c.seen_variance)},
                         {"completed_variance", mean_sd_json(c.completed_variance)},
                         {"toxic_seen", mean_sd_json(c.toxic_seen)},
                         {"toxic_completed", mean_sd_json(c.toxic_completed)},
                         {"longest_toxic_run", mean_sd_json(c.longest_toxic_run)},
                         {"completed_seen_ratio", mean_sd_json(c.completed_seen_ratio)},
                         {"optimal", optimal_json(c.optimal)}});
    }
    return {{"schema_version", kSchemaVersion},
            {"setting", setting},
            {"config", config_to_json(summary.config)},
            {"metadata",
             {{"config_hash", hash.str()},
              {"master_seed", summary.master_seed},
              {"trials", summary.trials},
              {"per_mod_metrics", "mean over mods within a trial, then mean/sd over trials"},
              {"variance", "population variance across mods within a trial, averaged over trials"},
              {"sd", "sample standard deviation over trials"}}},
            {"cells", cells}};
}

void print_table(std::ostream& out, const std::string& setting, const ExperimentSummary& summary) {
    out << "setting " << setting << ", " << summary.trials << " trials, seed "
        << summary.master_seed << '\n';
    out << std::setw(5) << "k" << std::setw(11) << "time" << std::setw(9) << "optimal"
        << std::setw(11) << "collisions" << std::setw(9) << "seen" << std::setw(11)
        << "completed" << std::setw(8) << "done%" << std::setw(10) << "tox run" << '\n';
    out << std::fixed;
    for (const auto& c : summary.cells) {
        out << std::setw(5) << c.team_size << std::setprecision(1) << std::setw(11)
            << c.completion_time.mean << std::setw(9) << c.optimal.completion_time_lower_bound
            << std::setw(11) << c.collisions.mean << std::setw(9) << c.reports_seen.mean
            << std::setw(11) << c.reports_completed.mean << std::setw(8)
            << 100.0 * c.completed_seen_ratio.mean << std::setprecision(2) << std::setw(10)
            << c.longest_toxic_run.mean << '\n';
    }
    out.unsetf(std::ios::floatfield);
}

int cmd_run(const std::filesystem::path& config_path, const Options& options, std::ostream& out,
            std::ostream& err) {
    const auto config = resolve_config(config_path, options, err);
    if (!config) return kExitConfig;
    return run_single(std::string(kBaseSetting), *config, options, out, err);
}

int cmd_baseline(const Options& options, std::ostream& out, std::ostream& err) {
    auto config = baseline_preset();
    config.master_seed = options.seed.value_or(kDefaultSeed);
    if (options.trials) config.trials = *options.trials;
    const auto violations = check_config(config);
    if (!violations.empty()) {
        for (const auto& v : violations) err << "error: " << v.field << ": " << v.message << '\n';
        return kExitConfig;
    }
    return run_single("baseline", config, options, out, err);
}

int cmd_compare(const std::filesystem::path& config_path, const std::vector<std::string>& names,
                const Options& options, std::ostream& out, std::ostream& err) {
    std::vector<Variant> variants;
    try {
        for (const auto& n : names) variants.push_back(parse_variant(n));
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    const auto config = resolve_config(config_path, options, err);
    if (!config) return kExitConfig;

    Comparison comparison;
    try {
        comparison = compare_interventions(*config, variants, {options.jobs, options.events});
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    std::vector<NamedRun> runs;
    json settings = json::array();
    for (const auto& s : comparison.settings) {
        runs.push_back({s.name, &s.run});
        settings.push_back(summary_to_json(s.name, s.run.summary));
    }
    const json summary = {{"schema_version", kSchemaVersion}, {"settings", settings}};
    const int rc = write_run_outputs(options, runs, summary, &comparison, err);
    if (rc != kExitOk) return rc;

    for (const auto& s : comparison.settings) print_table(out, s.name, s.run.summary);
    out << "average change vs " << kBaseSetting << " over team sizes:\n";
    for (const auto& s : comparison.settings) {
        if (s.name == kBaseSetting) continue;
        const auto& time = comparison.overall(s.name, "completion_time");
        const auto& coll = comparison.overall(s.name, "collisions");
        out << "  " << s.name << ": completion time " << std::fixed << std::setprecision(2)
            << time.pct_change << "%, collisions " << coll.pct_change << "%\n";
        out.unsetf(std::ios::floatfield);
    }
    return kExitOk;
}

int main(int argc, char** argv) {
    CLI::App app{"Agent-based simulator of moderators working a shared moderation queue"};
    app.require_subcommand(1);

    Options options;
    std::uint64_t seed = 0;
    int trials = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output,-o", options.output, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Master seed (u64)");
        sub->add_option("--trials", trials, "Trials per team size")->check(CLI::PositiveNumber);
        sub->add_option("--jobs,-j", options.jobs, "Concurrent trials")->check(CLI::PositiveNumber);
        sub->add_flag("--events", options.events, "Write per-trial event log (events.jsonl)");
    };

    std::filesystem::path config_path;
    std::vector<std::string> variants;

    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    add_common(run);

    auto* baseline = app.add_subcommand("baseline", "Run the synthetic baseline preset");
    add_common(baseline);

    auto* compare = app.add_subcommand("compare", "Compare interventions against a base config");
    compare->add_option("config", config_path, "Base config (JSON)")->required();
    compare->add_option("variants", variants,
                        "Variants: reverse, random, distribute-toxicity, awareness=<p>; join with '+'");
    add_common(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    auto* active = app.get_subcommands().front();
    if (active->count("--seed")) options.seed = seed;
    if (active->count("--trials")) options.trials = trials;

    try {
        if (active == run) return cmd_run(config_path, options, std::cout, std::cerr);
        if (active == baseline) return cmd_baseline(options, std::cout, std::cerr);
        return cmd_compare(config_path, variants, options, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace modq::cli
