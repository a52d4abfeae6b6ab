#pragma once

/// @file runner.hpp
/// Experiment plumbing shared by the CLI and the tests: configured runs with
/// CSV logging, and uniform random hyperparameter sweeps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pcgp/config.hpp"
#include "pcgp/evolve.hpp"
#include "pcgp/rng.hpp"

namespace pcgp {

inline constexpr const char* kLogHeader = "generation,evaluations,best_fitness,mean_fitness,best_active_nodes";

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_log_row(std::ostream& os, const RunRecord& r) {
    os << r.generation << ',' << r.evaluations << ',' << format_real(r.best_fitness) << ','
       << format_real(r.mean_fitness) << ',' << r.best_active_nodes << '\n';
}

struct Experiment {
    RunConfig config;
    Problem problem;
    std::shared_ptr<const FunctionSet> fset;
    EvoParams params; // config params with the problem's shape filled in
};

inline Experiment prepare(const RunConfig& cfg) {
    Experiment e{cfg, {}, std::make_shared<const FunctionSet>(FunctionSet::from_names(cfg.functions)), cfg.params};
    e.problem = make_problem(cfg.problem, cfg.params.decode, e.fset);
    e.params.n_in = e.problem.n_in;
    e.params.n_out = e.problem.n_out;
    check(e.params);
    return e;
}

/// Runs one evolution. When `log` is given the CSV header and one row per
/// generation are streamed to it.
inline RunResult run_experiment(const Experiment& e, std::ostream* log = nullptr) {
    if (log) *log << kLogHeader << '\n';
    RecordSink sink;
    if (log) sink = [log](const RunRecord& r) { write_log_row(*log, r); };
    return evolve(e.problem.fitness, e.params, *e.fset, sink);
}

// ---------------------------------------------------------------------------
// Random sweep

/// Keys a sweep samples, in CSV column order.
inline const std::vector<std::string>& sweep_keys() {
    static const std::vector<std::string> keys = {
        "algorithm", "mutation", "crossover", "lambda",  "ga_population", "i_start",    "r",
        "w",         "m_active", "m_input",   "m_output", "m_node",       "m_delta",    "m_modify",
        "ga_elitism", "ga_crossover", "ga_mutation"};
    return keys;
}

/// One parameter set drawn uniformly from the allowed ranges (reals on a 0.1
/// grid). Operators are drawn only among those valid for `mode`.
inline nlohmann::json sample_params(Rng& rng, Mode mode) {
    auto grid = [&](double lo, double hi) {
        const auto steps = static_cast<std::size_t>(std::lround((hi - lo) / 0.1));
        return std::round((lo + 0.1 * static_cast<double>(rng.below(steps + 1))) * 10.0) / 10.0;
    };
    std::vector<std::string> mutations = {"gene", "mixed_node"};
    std::vector<std::string> crossovers = {"single_point", "proportional", "random_node"};
    if (mode == Mode::pcgp) {
        mutations.push_back("mixed_subgraph");
        for (auto s : {"aligned_node", "output_graph", "subgraph"}) crossovers.emplace_back(s);
    }
    static constexpr int populations[] = {20, 40, 60, 80, 100, 120, 140, 160, 200};

    nlohmann::json j;
    j["algorithm"] = rng.coin() ? "ga" : "one_plus_lambda";
    j["mutation"] = mutations[rng.below(mutations.size())];
    j["crossover"] = crossovers[rng.below(crossovers.size())];
    j["lambda"] = 1 + static_cast<int>(rng.below(10));
    j["ga_population"] = populations[rng.below(std::size(populations))];
    if (mode == Mode::pcgp) j["i_start"] = grid(-1.0, -0.1);
    j["r"] = grid(0.0, 1.0);
    j["w"] = rng.coin();
    j["m_active"] = rng.coin();
    if (mode == Mode::pcgp) j["m_input"] = grid(0.0, 1.0);
    j["m_output"] = grid(0.1, 1.0);
    j["m_node"] = grid(0.1, 1.0);
    j["m_delta"] = grid(0.1, 0.5);
    j["m_modify"] = grid(0.1, 0.9);
    j["ga_elitism"] = grid(0.0, 0.8);
    j["ga_crossover"] = grid(0.1, 1.0);
    j["ga_mutation"] = grid(0.1, 1.0);
    return j;
}

struct SweepTrial {
    std::size_t trial = 0;
    nlohmann::json params;
    double fitness = 0.0;
    std::string error; // non-empty when the trial could not run
};

/// Runs `n_trials` sampled parameter sets on top of `base` (all with the
/// base seed). Results are sorted by fitness, best first; ties keep trial order.
inline std::vector<SweepTrial> sweep(const RunConfig& base, std::size_t n_trials, std::uint64_t sweep_seed,
                                     std::size_t threads = 1) {
    std::vector<SweepTrial> trials(n_trials);
    for (std::size_t t = 0; t < n_trials; ++t) {
        Rng rng(derive_seed(sweep_seed, {0x5eed, t}));
        trials[t].trial = t;
        trials[t].params = sample_params(rng, base.params.mode);
    }
    auto run_trial = [&](SweepTrial& tr) {
        try {
            nlohmann::json doc = base.source;
            for (auto it = tr.params.begin(); it != tr.params.end(); ++it) doc[it.key()] = it.value();
            const auto exp = prepare(parse_config(doc));
            tr.fitness = run_experiment(exp).best_fitness;
        } catch (const std::exception& e) {
            tr.fitness = kFailedFitness;
            tr.error = e.what();
        }
    };
    const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), n_trials);
    if (workers <= 1) {
        for (auto& tr : trials) run_trial(tr);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < trials.size(); i = next++) run_trial(trials[i]);
            });
    }
    std::stable_sort(trials.begin(), trials.end(),
                     [](const SweepTrial& a, const SweepTrial& b) { return a.fitness > b.fitness; });
    return trials;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepTrial>& trials) {
    os << "rank,trial,fitness";
    for (const auto& k : sweep_keys()) os << ',' << k;
    os << ",error\n";
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& t = trials[i];
        os << i + 1 << ',' << t.trial << ',' << format_real(t.fitness);
        for (const auto& k : sweep_keys()) {
            os << ',';
            if (!t.params.contains(k)) continue;
            const auto& v = t.params[k];
            if (v.is_string()) os << v.get<std::string>();
            else if (v.is_boolean()) os << (v.get<bool>() ? 1 : 0);
            else os << v.dump();
        }
        std::string err = t.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << ',' << err << '\n';
    }
}

} // namespace pcgp
