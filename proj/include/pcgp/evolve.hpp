#pragma once

/// @file evolve.hpp
/// 1+lambda EA and generational GA over a maximised fitness function.
///
/// Both loops count fitness evaluations and stop at the first generation
/// boundary where the count reaches the budget. Every child gets its own
/// random stream derived from (seed, generation, slot), so runs are
/// reproducible whether or not evaluation is parallel.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pcgp/crossover.hpp"
#include "pcgp/decode.hpp"
#include "pcgp/error.hpp"
#include "pcgp/functions.hpp"
#include "pcgp/genome.hpp"
#include "pcgp/mutate.hpp"
#include "pcgp/rng.hpp"

namespace pcgp {

enum class Algorithm { one_plus_lambda, ga };

inline std::string_view to_string(Algorithm a) { return a == Algorithm::ga ? "ga" : "one_plus_lambda"; }

inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "one_plus_lambda") return Algorithm::one_plus_lambda;
    if (s == "ga") return Algorithm::ga;
    throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected one_plus_lambda or ga)");
}

struct EvoParams {
    Algorithm algorithm = Algorithm::one_plus_lambda;
    Mode mode = Mode::cgp;
    std::size_t n_in = 1;
    std::size_t n_out = 1;
    std::size_t n_nodes = 50; // initial genome size

    std::size_t lambda = 4;
    std::size_t ga_population = 20;
    double ga_elitism = 0.1;
    double ga_crossover = 0.2;
    double ga_mutation = 0.3;
    std::size_t tournament_size = 3;

    MutationParams mutation;
    std::optional<CrossoverOp> crossover;
    DecodeSettings decode;

    std::size_t budget = 20000;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

struct RunRecord {
    std::size_t generation = 0;
    std::size_t evaluations = 0;
    double best_fitness = 0.0; // best found so far in the run
    double mean_fitness = 0.0; // mean over the current generation
    std::size_t best_active_nodes = 0;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct RunResult {
    Genome best;
    double best_fitness = 0.0;
    std::vector<RunRecord> log;
};

using FitnessFn = std::function<double(const Genome&)>;
using RecordSink = std::function<void(const RunRecord&)>;

/// Fitness recorded for an individual whose evaluation threw.
inline constexpr double kFailedFitness = std::numeric_limits<double>::lowest();

/// Slot counts of one GA generation.
struct GaSlots {
    std::size_t elites = 0;
    std::size_t crossovers = 0;
    std::size_t mutants = 0;
    std::size_t copies = 0;
};

/// round(fraction * P) per channel. Overflow is taken from mutation first,
/// then crossover; elites are always kept. Unfilled slots become copies.
inline GaSlots ga_slots(const EvoParams& p) {
    const auto pop = static_cast<double>(p.ga_population);
    auto count = [&](double f) { return static_cast<std::size_t>(std::lround(f * pop)); };
    GaSlots s{std::min(count(p.ga_elitism), p.ga_population), count(p.ga_crossover), count(p.ga_mutation), 0};
    std::size_t used = s.elites + s.crossovers + s.mutants;
    if (used > p.ga_population) {
        std::size_t over = used - p.ga_population;
        const std::size_t from_m = std::min(over, s.mutants);
        s.mutants -= from_m;
        over -= from_m;
        s.crossovers -= std::min(over, s.crossovers);
        used = p.ga_population;
    }
    s.copies = p.ga_population - used;
    return s;
}

/// Structural checks that must hold before a run starts.
inline void check(const EvoParams& p) {
    if (p.n_in == 0 || p.n_out == 0) throw ConfigError("problem needs at least one input and one output");
    check(p.decode, p.mode);
    const auto& b = p.mutation.bounds;
    if (b.size_min > b.size_max) throw ConfigError("size_min exceeds size_max");
    if (!b.contains(p.n_nodes))
        throw ConfigError("initial node count " + std::to_string(p.n_nodes) + " outside [size_min, size_max]");
    if (p.mode == Mode::cgp && p.mutation.op == MutationOp::mixed_subgraph)
        throw ConfigError("mixed_subgraph mutation requires pcgp mode");
    if (p.algorithm == Algorithm::one_plus_lambda) {
        if (p.lambda < 1) throw ConfigError("lambda must be at least 1");
        if (p.budget < p.lambda + 1) throw ConfigError("budget must cover the parent and one generation");
        return;
    }
    if (p.ga_population < 2) throw ConfigError("GA population must be at least 2");
    if (p.budget < p.ga_population) throw ConfigError("budget smaller than GA population");
    if (p.tournament_size < 1) throw ConfigError("tournament size must be at least 1");
    for (double f : {p.ga_elitism, p.ga_crossover, p.ga_mutation})
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("GA fractions must lie in [0,1]");
    const auto slots = ga_slots(p);
    if (slots.crossovers + slots.mutants == 0)
        throw ConfigError("GA settings produce no new individuals per generation");
    if (slots.crossovers > 0) {
        if (!p.crossover) throw ConfigError("GA with crossover fraction > 0 needs a crossover operator");
        if (pcgp_only(*p.crossover) && p.mode == Mode::cgp)
            throw ConfigError(std::string(to_string(*p.crossover)) + " crossover requires pcgp mode");
    }
}

/// Order-preserving fitness of every genome, using up to `threads` workers.
/// An evaluation that throws yields kFailedFitness and a warning on stderr.
inline std::vector<double> evaluate_population(const std::vector<Genome>& genomes, const FitnessFn& fit,
                                               std::size_t threads = 1) {
    std::vector<double> out(genomes.size(), kFailedFitness);
    std::vector<std::string> errors(genomes.size());
    auto eval_one = [&](std::size_t i) {
        try {
            out[i] = fit(genomes[i]);
        } catch (const std::exception& e) {
            out[i] = kFailedFitness;
            errors[i] = e.what();
        } catch (...) {
            out[i] = kFailedFitness;
            errors[i] = "unknown exception";
        }
    };
    const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), genomes.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < genomes.size(); ++i) eval_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < genomes.size(); i = next++) eval_one(i);
            });
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            std::cerr << "warning: fitness evaluation of individual " << i << " failed: " << errors[i] << '\n';
    return out;
}

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Tags separating the random streams of one run.
inline constexpr std::uint64_t kInitStream = 0;
inline constexpr std::uint64_t kSelectionStream = 1;
inline constexpr std::uint64_t kChildStream = 2;

inline Rng child_rng(const EvoParams& p, std::size_t generation, std::size_t slot) {
    return Rng(derive_seed(p.seed, {kChildStream, generation, slot}));
}

inline Genome initial_genome(const EvoParams& p, std::size_t slot) {
    Rng rng(derive_seed(p.seed, {kInitStream, slot}));
    return random_genome(p.mode, p.n_in, p.n_out, p.n_nodes, rng);
}

// Tournament selection: uniform with replacement, best wins, ties uniform.
inline std::size_t tournament(const std::vector<double>& fitness, std::size_t size, Rng& rng) {
    std::vector<std::size_t> entrants(size);
    for (auto& e : entrants) e = rng.below(fitness.size());
    double best = fitness[entrants[0]];
    for (auto e : entrants) best = std::max(best, fitness[e]);
    std::vector<std::size_t> tied;
    for (auto e : entrants)
        if (fitness[e] == best) tied.push_back(e);
    return tied[rng.below(tied.size())];
}

} // namespace detail

/// One parent, lambda mutants per generation. The best mutant replaces the
/// parent when its fitness is at least the parent's, so neutral drift happens.
inline RunResult one_plus_lambda(const FitnessFn& fit, const EvoParams& p, const FunctionSet& fset,
                                 const RecordSink& sink = {}) {
    check(p);
    RunResult res;
    auto record = [&](std::size_t gen, std::size_t evals, double mean) {
        RunRecord r{gen, evals, res.best_fitness, mean, decode(res.best, p.decode, fset).active_count()};
        res.log.push_back(r);
        if (sink) sink(r);
    };

    res.best = detail::initial_genome(p, 0);
    try {
        res.best_fitness = fit(res.best);
    } catch (const std::exception& e) {
        throw EvolutionError(std::string("evaluating the initial parent (seed ") + std::to_string(p.seed) +
                             ") failed: " + e.what());
    }
    std::size_t evals = 1;
    record(0, evals, res.best_fitness);

    for (std::size_t gen = 1; evals < p.budget; ++gen) {
        std::vector<Genome> children;
        children.reserve(p.lambda);
        for (std::size_t i = 0; i < p.lambda; ++i) {
            Rng rng = detail::child_rng(p, gen, i);
            children.push_back(mutate(res.best, p.mutation, p.decode, fset, rng));
        }
        const auto fitness = evaluate_population(children, fit, p.threads);
        evals += children.size();

        const auto top = static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
        const double parent_fitness = res.best_fitness;
        if (fitness[top] >= res.best_fitness) {
            res.best = std::move(children[top]);
            res.best_fitness = fitness[top];
        }
        auto all = fitness;
        all.push_back(parent_fitness);
        record(gen, evals, detail::mean_of(all));
    }
    return res;
}

/// Generational GA: elites, crossover children of two distinct tournament
/// winners, mutants of tournament winners, and unmodified tournament winners
/// for any remaining slots. Only crossover children and mutants are evaluated.
inline RunResult ga(const FitnessFn& fit, const EvoParams& p, const FunctionSet& fset, const RecordSink& sink = {}) {
    check(p);
    const auto slots = ga_slots(p);
    const std::size_t pop_size = p.ga_population;

    std::vector<Genome> pop;
    pop.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) pop.push_back(detail::initial_genome(p, i));
    std::vector<double> fitness = evaluate_population(pop, fit, p.threads);
    if (std::all_of(fitness.begin(), fitness.end(), [](double f) { return f == kFailedFitness; }))
        throw EvolutionError("every individual of the initial GA population failed to evaluate (seed " +
                             std::to_string(p.seed) + ")");
    std::size_t evals = pop_size;

    RunResult res;
    res.best_fitness = -std::numeric_limits<double>::infinity();
    auto track_best = [&] {
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (fitness[i] > res.best_fitness) {
                res.best = pop[i];
                res.best_fitness = fitness[i];
            }
    };
    auto record = [&](std::size_t gen) {
        RunRecord r{gen, evals, res.best_fitness, detail::mean_of(fitness),
                    decode(res.best, p.decode, fset).active_count()};
        res.log.push_back(r);
        if (sink) sink(r);
    };
    track_best();
    record(0);

    const std::size_t max_size = p.mutation.bounds.size_max;
    for (std::size_t gen = 1; evals < p.budget; ++gen) {
        Rng select(derive_seed(p.seed, {detail::kSelectionStream, gen}));

        std::vector<std::size_t> order(pop_size);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fitness[a] > fitness[b]; });

        std::vector<Genome> next;
        std::vector<double> next_fitness;
        next.reserve(pop_size);
        for (std::size_t i = 0; i < slots.elites; ++i) {
            next.push_back(pop[order[i]]);
            next_fitness.push_back(fitness[order[i]]);
        }

        std::vector<Genome> fresh;
        std::size_t slot = 0;
        for (std::size_t i = 0; i < slots.crossovers; ++i, ++slot) {
            const auto a = detail::tournament(fitness, p.tournament_size, select);
            auto b = detail::tournament(fitness, p.tournament_size, select);
            while (b == a) b = detail::tournament(fitness, p.tournament_size, select);
            Rng rng = detail::child_rng(p, gen, slot);
            fresh.push_back(crossover(*p.crossover, pop[a], pop[b], p.decode, fset, max_size, rng));
        }
        for (std::size_t i = 0; i < slots.mutants; ++i, ++slot) {
            const auto w = detail::tournament(fitness, p.tournament_size, select);
            Rng rng = detail::child_rng(p, gen, slot);
            fresh.push_back(mutate(pop[w], p.mutation, p.decode, fset, rng));
        }
        std::vector<std::size_t> copies;
        for (std::size_t i = 0; i < slots.copies; ++i) copies.push_back(detail::tournament(fitness, p.tournament_size, select));

        const auto fresh_fitness = evaluate_population(fresh, fit, p.threads);
        evals += fresh.size();
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            next.push_back(std::move(fresh[i]));
            next_fitness.push_back(fresh_fitness[i]);
        }
        for (auto c : copies) {
            next.push_back(pop[c]);
            next_fitness.push_back(fitness[c]);
        }
        pop = std::move(next);
        fitness = std::move(next_fitness);
        track_best();
        record(gen);
    }
    return res;
}

inline RunResult evolve(const FitnessFn& fit, const EvoParams& p, const FunctionSet& fset,
                        const RecordSink& sink = {}) {
    return p.algorithm == Algorithm::ga ? ga(fit, p, fset, sink) : one_plus_lambda(fit, p, fset, sink);
}

} // namespace pcgp
