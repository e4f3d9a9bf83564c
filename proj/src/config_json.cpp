#include "modq/config_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace modq {

using nlohmann::json;

namespace {

// Collects schema problems so a single load reports all of them.
class Reader {
public:
    explicit Reader(std::vector<ConfigViolation>& errors) : errors_(errors) {}

    void reject_unknown(const json& obj, const std::set<std::string>& known,
                        const std::string& where) {
        for (const auto& [key, _] : obj.items()) {
            if (!known.contains(key)) {
                errors_.push_back({where.empty() ? key : where + "." + key,
                                   "unknown field '" + key + "'"});
            }
        }
    }

    template <typename T>
    void read(const json& obj, const std::string& key, const std::string& field, T& out) {
        auto it = obj.find(key);
        if (it == obj.end()) return;
        if (!matches<T>(*it)) {
            errors_.push_back({field, "expected " + type_name<T>()});
            return;
        }
        out = it->template get<T>();
    }

    void error(std::string field, std::string message) {
        errors_.push_back({std::move(field), std::move(message)});
    }

    template <typename T>
    static bool matches(const json& v) {
        if constexpr (std::is_same_v<T, bool>) {
            return v.is_boolean();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            return v.is_number_unsigned();
        } else if constexpr (std::is_integral_v<T>) {
            return v.is_number_integer();
        } else if constexpr (std::is_floating_point_v<T>) {
            return v.is_number();
        } else if constexpr (std::is_same_v<T, std::string>) {
            return v.is_string();
        } else {
            // std::vector<U>
            if (!v.is_array()) return false;
            for (const auto& e : v)
                if (!matches<typename T::value_type>(e)) return false;
            return true;
        }
    }

    template <typename T>
    static std::string type_name() {
        if constexpr (std::is_same_v<T, bool>) return "boolean";
        else if constexpr (std::is_same_v<T, std::uint64_t>) return "unsigned 64-bit integer";
        else if constexpr (std::is_integral_v<T>) return "integer";
        else if constexpr (std::is_floating_point_v<T>) return "number";
        else if constexpr (std::is_same_v<T, std::string>) return "string";
        else return "array of " + type_name<typename T::value_type>();
    }

private:
    std::vector<ConfigViolation>& errors_;
};

json strategy_to_json(const SelectionStrategy& s) {
    if (const auto* top = std::get_if<TopTwo>(&s)) return {{"kind", "top_two"}, {"p_first", top->p_first}};
    return {{"kind", "uniform"}};
}

json toxicity_to_json(const ToxicityModel& t) {
    if (const auto* b = std::get_if<BernoulliZeroOne>(&t))
        return {{"kind", "bernoulli_zero_one"}, {"p_toxic", b->p_toxic}};
    return {{"kind", "explicit"}, {"values", std::get<ExplicitToxicity>(t).values}};
}

void read_strategy(Reader& r, const json& v, SelectionStrategy& out) {
    if (!v.is_object() || !v.contains("kind") || !v["kind"].is_string()) {
        r.error("strategy", "expected object with string 'kind'");
        return;
    }
    const auto kind = v["kind"].get<std::string>();
    if (kind == "top_two") {
        r.reject_unknown(v, {"kind", "p_first"}, "strategy");
        TopTwo top;
        r.read(v, "p_first", "strategy.p_first", top.p_first);
        out = top;
    } else if (kind == "uniform") {
        r.reject_unknown(v, {"kind"}, "strategy");
        out = Uniform{};
    } else {
        r.error("strategy.kind", "unknown strategy kind '" + kind + "'");
    }
}

void read_toxicity(Reader& r, const json& v, ToxicityModel& out) {
    if (!v.is_object() || !v.contains("kind") || !v["kind"].is_string()) {
        r.error("toxicity", "expected object with string 'kind'");
        return;
    }
    const auto kind = v["kind"].get<std::string>();
    if (kind == "bernoulli_zero_one") {
        r.reject_unknown(v, {"kind", "p_toxic"}, "toxicity");
        BernoulliZeroOne b;
        r.read(v, "p_toxic", "toxicity.p_toxic", b.p_toxic);
        out = b;
    } else if (kind == "explicit") {
        r.reject_unknown(v, {"kind", "values"}, "toxicity");
        ExplicitToxicity e;
        if (!v.contains("values")) r.error("toxicity.values", "explicit toxicity requires 'values'");
        r.read(v, "values", "toxicity.values", e.values);
        out = e;
    } else {
        r.error("toxicity.kind", "unknown toxicity kind '" + kind + "'");
    }
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
    json doc;
    doc["num_reports"] = c.num_reports;
    if (const int* l = std::get_if<int>(&c.report_length)) doc["report_length"] = *l;
    else doc["report_length"] = std::get<std::vector<int>>(c.report_length);
    doc["team_sizes"] = c.team_sizes;
    doc["trials"] = c.trials;
    doc["master_seed"] = c.master_seed;
    doc["view_policy"] = to_string(c.view_policy);
    doc["distribute_toxicity"] = c.distribute_toxicity;
    doc["awareness"] = c.awareness;
    doc["strategy"] = strategy_to_json(c.strategy);
    doc["toxicity"] = toxicity_to_json(c.toxicity);
    doc["toxicity_threshold"] = c.toxicity_threshold;
    return doc;
}

ExperimentConfig config_from_json(const json& doc) {
    std::vector<ConfigViolation> errors;
    Reader r(errors);
    ExperimentConfig c;
    if (!doc.is_object()) throw ConfigError(std::vector<ConfigViolation>{{"", "config must be a JSON object"}});

    r.reject_unknown(doc,
                     {"num_reports", "report_length", "team_sizes", "trials", "master_seed",
                      "view_policy", "distribute_toxicity", "awareness", "strategy", "toxicity",
                      "toxicity_threshold"},
                     "");
    r.read(doc, "num_reports", "num_reports", c.num_reports);
    if (auto it = doc.find("report_length"); it != doc.end()) {
        if (it->is_number_integer()) {
            c.report_length = it->get<int>();
        } else if (Reader::matches<std::vector<int>>(*it)) {
            c.report_length = it->get<std::vector<int>>();
        } else {
            r.error("report_length", "expected integer or array of integer");
        }
    }
    r.read(doc, "team_sizes", "team_sizes", c.team_sizes);
    r.read(doc, "trials", "trials", c.trials);
    r.read(doc, "master_seed", "master_seed", c.master_seed);
    std::string policy = to_string(c.view_policy);
    r.read(doc, "view_policy", "view_policy", policy);
    try {
        c.view_policy = parse_view_policy(policy);
    } catch (const std::invalid_argument& e) {
        r.error("view_policy", e.what());
    }
    r.read(doc, "distribute_toxicity", "distribute_toxicity", c.distribute_toxicity);
    r.read(doc, "awareness", "awareness", c.awareness);
    if (auto it = doc.find("strategy"); it != doc.end()) read_strategy(r, *it, c.strategy);
    if (auto it = doc.find("toxicity"); it != doc.end()) read_toxicity(r, *it, c.toxicity);
    r.read(doc, "toxicity_threshold", "toxicity_threshold", c.toxicity_threshold);

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    return config_from_json(json::parse(in));
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config_to_json(config).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace modq
