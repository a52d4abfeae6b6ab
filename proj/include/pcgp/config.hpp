#pragma once

/// @file config.hpp
/// Run configuration: a JSON document whose keys mirror EvoParams,
/// DecodeSettings and MutationParams, plus the problem to solve.
///
/// Keys (all optional; defaults in parentheses):
///
///     name ("run"), mode ("cgp"), algorithm ("one_plus_lambda"),
///     lambda (4), ga_population (50), ga_elitism (0.1), ga_crossover (0.2),
///     ga_mutation (0.3), tournament_size (3),
///     mutation ("gene"), crossover (none),
///     r (0.0), i_start (-0.5), w (false),
///     m_active (false), m_input (0.1), m_output (0.1), m_node (0.1),
///     m_delta (0.1), m_modify (0.5), m_add_inverted (false),
///     nodes (50), size_min (floor(nodes/2)), size_max (ceil(1.5 nodes)),
///     budget (20000; 10000 for cartpole), seed (0), threads (1),
///     functions (add sub mult pdiv sin cos abs const),
///     problem {type: polynomial|classification|regression|cartpole,
///              path, points (50), episode_len (500), cartpole_seed (0)}
///
/// Tunable parameters are range-checked against the search ranges the
/// operators were designed for (see kParamRanges).

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pcgp/bench.hpp"
#include "pcgp/crossover.hpp"
#include "pcgp/error.hpp"
#include "pcgp/evolve.hpp"
#include "pcgp/functions.hpp"
#include "pcgp/mutate.hpp"

namespace pcgp {

using json = nlohmann::json;

struct ParamRange {
    std::string_view key;
    double lo;
    double hi;
    bool integer;
};

/// Allowed ranges of the tunable parameters.
inline constexpr ParamRange kParamRanges[] = {
    {"lambda", 1, 10, true},         {"ga_population", 20, 200, true}, {"i_start", -1.0, -0.1, false},
    {"r", 0.0, 1.0, false},          {"m_input", 0.0, 1.0, false},     {"m_output", 0.1, 1.0, false},
    {"m_node", 0.1, 1.0, false},     {"m_delta", 0.1, 0.5, false},     {"m_modify", 0.1, 0.9, false},
    {"ga_elitism", 0.0, 0.8, false}, {"ga_crossover", 0.1, 1.0, false}, {"ga_mutation", 0.1, 1.0, false},
};

enum class ProblemType { polynomial, classification, regression, cartpole };

inline std::string_view to_string(ProblemType t) {
    switch (t) {
    case ProblemType::polynomial: return "polynomial";
    case ProblemType::classification: return "classification";
    case ProblemType::regression: return "regression";
    case ProblemType::cartpole: return "cartpole";
    }
    return "?";
}

struct ProblemConfig {
    ProblemType type = ProblemType::polynomial;
    std::string path;
    std::size_t points = 50;
    std::size_t episode_len = 500;
    std::uint64_t cartpole_seed = 0;
};

struct RunConfig {
    std::string name = "run";
    EvoParams params; // n_in / n_out are filled in from the problem
    std::vector<std::string> functions = FunctionSet::standard().names();
    ProblemConfig problem;
    json source; // the document this config was parsed from, after overrides
};

namespace detail {

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "name",     "mode",         "algorithm", "lambda",     "ga_population", "ga_elitism",     "ga_crossover",
        "ga_mutation", "tournament_size", "mutation", "crossover", "r",          "i_start",        "w",
        "m_active", "m_input",      "m_output",  "m_node",     "m_delta",       "m_modify",       "m_add_inverted",
        "nodes",    "size_min",     "size_max",  "budget",     "seed",          "threads",        "functions",
        "problem",  "description"};
    return keys;
}

inline double number(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    return v.get<double>();
}

inline std::size_t count(const json& j, const std::string& key) {
    const double v = number(j, key);
    if (v < 0 || v != std::floor(v)) throw ConfigError("'" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

inline bool flag(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) return v.get<int>() == 1;
    throw ConfigError("'" + key + "' must be true/false or 0/1");
}

inline std::string text(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
    return v.get<std::string>();
}

inline std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

inline ProblemConfig parse_problem(const json& j) {
    ProblemConfig p;
    if (!j.is_object()) throw ConfigError("'problem' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "type" && it.key() != "path" && it.key() != "points" && it.key() != "episode_len" &&
            it.key() != "cartpole_seed")
            throw ConfigError("unknown problem key '" + it.key() + "'");
    if (j.contains("type")) {
        const auto t = text(j, "type");
        if (t == "polynomial") p.type = ProblemType::polynomial;
        else if (t == "classification") p.type = ProblemType::classification;
        else if (t == "regression") p.type = ProblemType::regression;
        else if (t == "cartpole") p.type = ProblemType::cartpole;
        else throw ConfigError("unknown problem type '" + t + "'");
    }
    if (j.contains("path")) p.path = text(j, "path");
    if (j.contains("points")) p.points = count(j, "points");
    if (j.contains("episode_len")) p.episode_len = count(j, "episode_len");
    if (j.contains("cartpole_seed")) p.cartpole_seed = static_cast<std::uint64_t>(count(j, "cartpole_seed"));
    if ((p.type == ProblemType::classification || p.type == ProblemType::regression) && p.path.empty())
        throw ConfigError(std::string(to_string(p.type)) + " problem needs a dataset 'path'");
    return p;
}

} // namespace detail

/// Checks every tunable parameter present in `j` against kParamRanges.
inline void validate_ranges(const json& j) {
    for (const auto& r : kParamRanges) {
        const std::string key(r.key);
        if (!j.contains(key)) continue;
        const double v = detail::number(j, key);
        if (!(v >= r.lo - 1e-12 && v <= r.hi + 1e-12))
            throw ConfigError(key + "=" + detail::fmt_num(v) + " outside allowed range [" + detail::fmt_num(r.lo) +
                              ", " + detail::fmt_num(r.hi) + "]");
        if (r.integer && v != std::floor(v)) throw ConfigError(key + " must be an integer");
    }
}

/// Parses and validates a config document.
inline RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!detail::known_keys().contains(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
    validate_ranges(j);

    RunConfig c;
    c.source = j;
    auto& p = c.params;
    p.ga_population = 50;
    try {
        if (j.contains("name")) c.name = detail::text(j, "name");
        if (j.contains("mode")) p.mode = parse_mode(detail::text(j, "mode"));
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    if (j.contains("algorithm")) p.algorithm = parse_algorithm(detail::text(j, "algorithm"));
    if (j.contains("lambda")) p.lambda = detail::count(j, "lambda");
    if (j.contains("ga_population")) p.ga_population = detail::count(j, "ga_population");
    if (j.contains("ga_elitism")) p.ga_elitism = detail::number(j, "ga_elitism");
    if (j.contains("ga_crossover")) p.ga_crossover = detail::number(j, "ga_crossover");
    if (j.contains("ga_mutation")) p.ga_mutation = detail::number(j, "ga_mutation");
    if (j.contains("tournament_size")) p.tournament_size = detail::count(j, "tournament_size");
    if (j.contains("mutation")) p.mutation.op = parse_mutation_op(detail::text(j, "mutation"));
    if (j.contains("crossover") && !j.at("crossover").is_null())
        p.crossover = parse_crossover_op(detail::text(j, "crossover"));
    if (j.contains("r")) p.decode.recurrency = detail::number(j, "r");
    if (j.contains("i_start")) p.decode.input_start = detail::number(j, "i_start");
    if (j.contains("w")) p.decode.weights = detail::flag(j, "w");
    if (j.contains("m_active")) p.mutation.m_active = detail::flag(j, "m_active");
    if (j.contains("m_input")) p.mutation.m_input = detail::number(j, "m_input");
    if (j.contains("m_output")) p.mutation.m_output = detail::number(j, "m_output");
    if (j.contains("m_node")) p.mutation.m_node = detail::number(j, "m_node");
    if (j.contains("m_delta")) p.mutation.m_delta = detail::number(j, "m_delta");
    if (j.contains("m_modify")) p.mutation.m_modify = detail::number(j, "m_modify");
    if (j.contains("m_add_inverted")) p.mutation.m_add_inverted = detail::flag(j, "m_add_inverted");
    if (j.contains("nodes")) p.n_nodes = detail::count(j, "nodes");
    p.mutation.bounds.size_min = p.n_nodes / 2;
    p.mutation.bounds.size_max = (3 * p.n_nodes + 1) / 2;
    if (j.contains("size_min")) p.mutation.bounds.size_min = detail::count(j, "size_min");
    if (j.contains("size_max")) p.mutation.bounds.size_max = detail::count(j, "size_max");
    if (j.contains("seed")) p.seed = static_cast<std::uint64_t>(detail::count(j, "seed"));
    if (j.contains("threads")) p.threads = detail::count(j, "threads");
    if (j.contains("functions")) {
        if (!j.at("functions").is_array()) throw ConfigError("'functions' must be an array of names");
        c.functions = j.at("functions").get<std::vector<std::string>>();
    }
    FunctionSet::from_names(c.functions); // rejects unknown names early
    if (j.contains("problem")) c.problem = detail::parse_problem(j.at("problem"));
    p.budget = c.problem.type == ProblemType::cartpole ? 10000 : 20000;
    if (j.contains("budget")) p.budget = detail::count(j, "budget");

    if (p.mode == Mode::cgp && p.crossover && pcgp_only(*p.crossover))
        throw ConfigError(std::string(to_string(*p.crossover)) + " crossover requires pcgp mode");
    if (p.mode == Mode::cgp && p.mutation.op == MutationOp::mixed_subgraph)
        throw ConfigError("mixed_subgraph mutation requires pcgp mode");
    if (p.algorithm == Algorithm::ga && !p.crossover)
        throw ConfigError("the GA needs a 'crossover' operator");

    // Problem shape is known only once the dataset is loaded; check the rest now.
    EvoParams probe = p;
    probe.n_in = probe.n_out = 1;
    check(probe);
    return c;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

/// Applies a `key=value` override to a top-level scalar. The value is read
/// as JSON when possible (numbers, true/false, null), otherwise as a string.
inline void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
    const std::string key(assignment.substr(0, eq));
    const std::string value(assignment.substr(eq + 1));
    if (doc.contains(key) && (doc[key].is_object() || doc[key].is_array()))
        throw ConfigError("override '" + key + "' does not name a scalar");
    try {
        doc[key] = json::parse(value);
    } catch (const json::exception&) {
        doc[key] = value;
    }
}

/// Rewrites a relative problem.path that does not exist from the working
/// directory so it is read relative to the config file instead.
inline void resolve_data_path(json& doc, const std::filesystem::path& config_path) {
    if (!doc.contains("problem") || !doc["problem"].is_object() || !doc["problem"].contains("path") ||
        !doc["problem"]["path"].is_string())
        return;
    std::filesystem::path data(doc["problem"]["path"].get<std::string>());
    if (data.is_relative() && !std::filesystem::exists(data))
        doc["problem"]["path"] = (config_path.parent_path() / data).string();
}

/// Reads a config file and applies `key=value` overrides.
inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    json j = read_json_file(path);
    for (const auto& o : overrides) apply_override(j, o);
    resolve_data_path(j, path);
    return parse_config(j);
}

/// Directory holding the shipped presets: $PCGP_PRESET_DIR, else the build-time default.
inline std::filesystem::path preset_dir() {
    if (const char* env = std::getenv("PCGP_PRESET_DIR")) return env;
#ifdef PCGP_DEFAULT_PRESET_DIR
    return PCGP_DEFAULT_PRESET_DIR;
#else
    return "presets";
#endif
}

/// A fitness function bound to a problem, with the genome shape it needs.
struct Problem {
    std::size_t n_in = 1;
    std::size_t n_out = 1;
    std::shared_ptr<const Dataset> data; // null for cart-pole
    FitnessFn fitness;
};

inline Problem make_problem(const ProblemConfig& pc, const DecodeSettings& s, std::shared_ptr<const FunctionSet> fset) {
    Problem p;
    switch (pc.type) {
    case ProblemType::cartpole: {
        p.n_in = 4;
        p.n_out = 1;
        CartPoleTask task{pc.episode_len, pc.cartpole_seed};
        p.fitness = [s, fset, task](const Genome& g) { return cartpole_fitness(g, s, *fset, task); };
        return p;
    }
    case ProblemType::polynomial: p.data = std::make_shared<Dataset>(polynomial_dataset(pc.points)); break;
    case ProblemType::regression: p.data = std::make_shared<Dataset>(load_csv(pc.path, Task::regression)); break;
    case ProblemType::classification:
        p.data = std::make_shared<Dataset>(load_csv(pc.path, Task::classification));
        break;
    }
    p.n_in = p.data->n_features();
    p.n_out = p.data->n_outputs();
    auto data = p.data;
    if (data->task == Task::classification)
        p.fitness = [s, fset, data](const Genome& g) { return classification_fitness(g, *data, s, *fset); };
    else
        p.fitness = [s, fset, data](const Genome& g) { return regression_fitness(g, *data, s, *fset); };
    return p;
}

} // namespace pcgp
