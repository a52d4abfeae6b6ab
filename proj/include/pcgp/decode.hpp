#pragma once

/// @file decode.hpp
/// Genome -> program graph. Connection genes become points on the position
/// axis, and each point snaps to the nearest addressable node.
///
/// Indices into the unified address space put the n_in program inputs first,
/// followed by the computational nodes in stored order. Outputs are never
/// addressable.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pcgp/error.hpp"
#include "pcgp/functions.hpp"
#include "pcgp/genome.hpp"

namespace pcgp {

struct DecodeSettings {
    double recurrency = 0.0;   // r in [0,1]; 0 keeps the graph feedforward
    double input_start = -0.5; // PCGP input space [input_start, 0], must be negative
    bool weights = false;      // multiply node outputs by their c gene

    friend bool operator==(const DecodeSettings&, const DecodeSettings&) = default;
};

inline void check(const DecodeSettings& s, Mode mode) {
    if (!(s.recurrency >= 0.0 && s.recurrency <= 1.0))
        throw ConfigError("recurrency r=" + std::to_string(s.recurrency) + " outside [0,1]");
    if (mode == Mode::pcgp && !(s.input_start >= -1.0 && s.input_start < 0.0))
        throw ConfigError("input_start=" + std::to_string(s.input_start) + " outside [-1,0)");
}

/// Point on the position axis that connection gene `x` of a node at `source`
/// refers to. CGP: x (r (1 - p) + p). PCGP stretches the same range down to
/// the start of the input space.
inline double connection_position(double x, double source, const DecodeSettings& s, Mode mode) {
    const double reach = s.recurrency * (1.0 - source) + source;
    if (mode == Mode::cgp) return x * reach;
    return x * (reach - s.input_start) + s.input_start;
}

/// Output genes cover the whole axis: [0,1] in CGP, [input_start,1] in PCGP.
inline double output_position(double o, const DecodeSettings& s, Mode mode) {
    if (mode == Mode::cgp) return o;
    return o * (1.0 - s.input_start) + s.input_start;
}

struct Candidate {
    std::size_t index = 0;
    double position = 0.0;
};

namespace detail {

// Strict ordering on (distance, position, index).
inline bool closer(double point, const Candidate& a, const Candidate& b) {
    const double da = std::abs(a.position - point);
    const double db = std::abs(b.position - point);
    if (da != db) return da < db;
    if (a.position != b.position) return a.position < b.position;
    return a.index < b.index;
}

} // namespace detail

/// Nearest candidate to `point`. Ties go to the smaller position, then the
/// smaller index. Candidates may be in any order.
inline std::size_t snap(double point, std::span<const Candidate> candidates) {
    if (candidates.empty()) throw DecodeError("no candidate to snap connection point to");
    const Candidate* best = &candidates[0];
    for (const auto& c : candidates.subspan(1))
        if (detail::closer(point, c, *best)) best = &c;
    return best->index;
}

/// Same contract as snap, for candidates sorted by (position, index).
/// O(log n). Returns the winning Candidate.
inline Candidate snap_sorted(double point, std::span<const Candidate> sorted) {
    if (sorted.empty()) throw DecodeError("no candidate to snap connection point to");
    auto by_pos = [](const Candidate& c, double v) { return c.position < v; };
    auto right = std::lower_bound(sorted.begin(), sorted.end(), point, by_pos);
    if (right == sorted.begin()) return *right;
    // First element of the run sharing the left neighbour's position has the smallest index.
    auto left = std::lower_bound(sorted.begin(), right, std::prev(right)->position, by_pos);
    if (right == sorted.end()) return *left;
    return detail::closer(point, *right, *left) ? *right : *left;
}

struct DecodedGraph {
    Mode mode = Mode::cgp;
    std::size_t n_in = 0;
    std::size_t n_out = 0;
    std::vector<double> positions;                   // unified index -> position
    std::vector<std::array<std::size_t, 2>> targets; // per node, unified indices
    std::vector<std::size_t> output_targets;         // per output, unified index
    std::vector<std::array<bool, 2>> recurrent;      // per node connection
    std::vector<std::size_t> function_index;         // per node
    std::vector<int> arity;                          // per node, arity of its function
    std::vector<bool> active;                        // per node
    std::vector<std::vector<std::size_t>> components; // node indices, each sorted; ordered by first node

    std::size_t n_nodes() const { return targets.size(); }
    bool is_input(std::size_t unified) const { return unified < n_in; }
    std::size_t node_of(std::size_t unified) const { return unified - n_in; }
    std::size_t active_count() const { return static_cast<std::size_t>(std::count(active.begin(), active.end(), true)); }

    friend bool operator==(const DecodedGraph&, const DecodedGraph&) = default;
};

namespace detail {

// Nodes reachable backwards from `start` (a unified index). When arity_aware,
// only the connections a node's function reads are followed.
inline void trace_from(const DecodedGraph& g, std::size_t start, bool arity_aware, std::vector<bool>& seen) {
    std::vector<std::size_t> stack;
    if (!g.is_input(start)) stack.push_back(g.node_of(start));
    while (!stack.empty()) {
        const std::size_t n = stack.back();
        stack.pop_back();
        if (seen[n]) continue;
        seen[n] = true;
        const int used = arity_aware ? g.arity[n] : 2;
        for (int k = 0; k < used; ++k) {
            const std::size_t t = g.targets[n][static_cast<std::size_t>(k)];
            if (!g.is_input(t) && !seen[g.node_of(t)]) stack.push_back(g.node_of(t));
        }
    }
}

inline std::vector<std::vector<std::size_t>> weak_components(const DecodedGraph& g) {
    const std::size_t n = g.n_nodes();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (auto t : g.targets[i])
            if (!g.is_input(t)) {
                auto a = find(i), b = find(g.node_of(t));
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = find(i);
        if (slot[root] == n) {
            slot[root] = out.size();
            out.emplace_back();
        }
        out[slot[root]].push_back(i);
    }
    return out;
}

} // namespace detail

/// Resolves every connection and output of `g`.
///
/// With r = 0 a node may only connect to inputs and to nodes strictly left of
/// it, so the result is a DAG. With r > 0 every input and node (itself
/// included) is a candidate. Outputs may snap to any input or node.
inline DecodedGraph decode(const Genome& g, const DecodeSettings& s, const FunctionSet& fset) {
    DecodedGraph out;
    out.mode = g.mode();
    out.n_in = g.n_in();
    out.n_out = g.n_out();
    const std::size_t n_nodes = g.n_nodes();
    const std::size_t total = g.n_in() + n_nodes;

    out.positions.resize(total);
    for (std::size_t i = 0; i < total; ++i) out.positions[i] = node_position(g, i, s.input_start);

    std::vector<Candidate> inputs(g.n_in());
    for (std::size_t i = 0; i < g.n_in(); ++i) inputs[i] = {i, out.positions[i]};
    std::sort(inputs.begin(), inputs.end(), [](const Candidate& a, const Candidate& b) {
        return a.position != b.position ? a.position < b.position : a.index < b.index;
    });
    // Stored node order is already sorted by (position, index).
    std::vector<Candidate> nodes(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j) nodes[j] = {g.n_in() + j, out.positions[g.n_in() + j]};

    auto resolve = [&](double point, std::size_t node_limit) {
        Candidate best = snap_sorted(point, inputs);
        if (node_limit > 0) {
            const Candidate n = snap_sorted(point, std::span<const Candidate>(nodes).first(node_limit));
            if (detail::closer(point, n, best)) best = n;
        }
        return best.index;
    };

    out.targets.resize(n_nodes);
    out.recurrent.resize(n_nodes);
    out.function_index.resize(n_nodes);
    out.arity.resize(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j) {
        const auto& genes = g.nodes()[j];
        const double source = out.positions[g.n_in() + j];
        std::size_t limit = n_nodes;
        if (s.recurrency == 0.0)
            limit = static_cast<std::size_t>(
                std::lower_bound(nodes.begin(), nodes.end(), source,
                                 [](const Candidate& c, double v) { return c.position < v; }) -
                nodes.begin());
        const std::array<double, 2> genes_xy = {genes.x, genes.y};
        for (std::size_t k = 0; k < 2; ++k) {
            const std::size_t t = resolve(connection_position(genes_xy[k], source, s, g.mode()), limit);
            out.targets[j][k] = t;
            out.recurrent[j][k] = t >= g.n_in() && out.positions[t] >= source;
        }
        out.function_index[j] = fset.index_of(genes.f);
        out.arity[j] = fset[out.function_index[j]].arity;
    }

    out.output_targets.resize(g.n_out());
    for (std::size_t o = 0; o < g.n_out(); ++o)
        out.output_targets[o] = resolve(output_position(g.outputs()[o], s, g.mode()), n_nodes);

    out.active.assign(n_nodes, false);
    for (auto t : out.output_targets) detail::trace_from(out, t, true, out.active);
    out.components = detail::weak_components(out);
    return out;
}

/// Computational nodes the given output depends on, sorted ascending. With
/// arity_aware = false both connections of every visited node are followed.
inline std::vector<std::size_t> output_trace(const DecodedGraph& g, std::size_t output, bool arity_aware) {
    if (output >= g.n_out) throw DecodeError("output index " + std::to_string(output) + " out of range");
    std::vector<bool> seen(g.n_nodes(), false);
    detail::trace_from(g, g.output_targets[output], arity_aware, seen);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i]) out.push_back(i);
    return out;
}

/// Inputs referenced by the traced nodes or directly by the output.
inline std::vector<bool> inputs_used(const DecodedGraph& g, std::span<const std::size_t> traced_nodes,
                                     std::span<const std::size_t> outputs, bool arity_aware) {
    std::vector<bool> used(g.n_in, false);
    for (auto o : outputs)
        if (g.is_input(g.output_targets[o])) used[g.output_targets[o]] = true;
    for (auto n : traced_nodes) {
        const int k_max = arity_aware ? g.arity[n] : 2;
        for (int k = 0; k < k_max; ++k) {
            const auto t = g.targets[n][static_cast<std::size_t>(k)];
            if (g.is_input(t)) used[t] = true;
        }
    }
    return used;
}

} // namespace pcgp
