#pragma once

/// @file mutate.hpp
/// Gene mutation, mixed node mutation and mixed subgraph mutation, with the
/// node/subgraph addition and deletion procedures they share.
///
/// Node-count bounds are enforced by truncation: an addition stops at
/// size_max and a deletion stops at size_min, so every operator always
/// returns a child.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pcgp/decode.hpp"
#include "pcgp/error.hpp"
#include "pcgp/functions.hpp"
#include "pcgp/genome.hpp"
#include "pcgp/rng.hpp"

namespace pcgp {

enum class MutationOp { gene, mixed_node, mixed_subgraph };

inline std::string_view to_string(MutationOp op) {
    switch (op) {
    case MutationOp::gene: return "gene";
    case MutationOp::mixed_node: return "mixed_node";
    case MutationOp::mixed_subgraph: return "mixed_subgraph";
    }
    return "?";
}

inline MutationOp parse_mutation_op(std::string_view s) {
    if (s == "gene") return MutationOp::gene;
    if (s == "mixed_node") return MutationOp::mixed_node;
    if (s == "mixed_subgraph") return MutationOp::mixed_subgraph;
    throw ConfigError("unknown mutation operator '" + std::string(s) + "'");
}

struct MutationParams {
    MutationOp op = MutationOp::gene;
    double m_node = 0.1;
    double m_output = 0.1;
    double m_input = 0.1;
    bool m_active = false;
    double m_delta = 0.1;
    double m_modify = 0.5;
    bool m_add_inverted = false; // use (size_max - n) instead of (n - size_min) in m_add
    SizeBounds bounds{0, 1000};
};

/// Retry cap for m_active: a genome whose outputs all snap to inputs has no
/// active node to mutate.
inline constexpr int kActiveRetryCap = 100;

/// Nodes added or removed per structural edit: max(1, round(m_delta * size_min)).
inline std::size_t delta_count(const MutationParams& p) {
    const auto k = std::lround(p.m_delta * static_cast<double>(p.bounds.size_min));
    return static_cast<std::size_t>(std::max<long>(1, k));
}

/// Probability of the addition branch in the mixed operators:
/// (n - size_min)(1 - m_modify) / (size_max - size_min).
/// Counts outside the bounds are clamped; equal bounds give 0.
inline double m_add(std::size_t n, const MutationParams& p) {
    const auto lo = static_cast<double>(p.bounds.size_min);
    const auto hi = static_cast<double>(p.bounds.size_max);
    if (p.bounds.size_max <= p.bounds.size_min) return 0.0;
    const double x = std::clamp(static_cast<double>(n), lo, hi);
    const double num = p.m_add_inverted ? hi - x : x - lo;
    return num / (hi - lo) * (1.0 - p.m_modify); // ratio first keeps both endpoints exact
}

namespace detail {

inline double maybe_replace(double v, double rate, Rng& rng, bool& changed) {
    if (!rng.bernoulli(rate)) return v;
    const double nv = rng.uniform();
    changed = changed || nv != v;
    return nv;
}

// One pass of gene mutation. Sets `hit_active` when a gene of an active node changed.
inline Genome gene_mutation_once(const Genome& g, const MutationParams& p, const std::vector<bool>* active,
                                 Rng& rng, bool& hit_active) {
    hit_active = false;
    std::vector<NodeGenes> nodes = g.nodes();
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        auto& n = nodes[j];
        bool changed = false;
        if (g.mode() == Mode::pcgp) n.p = maybe_replace(n.p, p.m_node, rng, changed);
        n.x = maybe_replace(n.x, p.m_node, rng, changed);
        n.y = maybe_replace(n.y, p.m_node, rng, changed);
        n.f = maybe_replace(n.f, p.m_node, rng, changed);
        n.c = maybe_replace(n.c, p.m_node, rng, changed);
        if (changed && active && (*active)[j]) hit_active = true;
    }
    std::vector<double> outputs = g.outputs();
    bool unused = false;
    for (auto& o : outputs) o = maybe_replace(o, p.m_output, rng, unused);
    std::vector<double> inputs = g.input_positions();
    for (auto& i : inputs) i = maybe_replace(i, p.m_input, rng, unused);
    return Genome(g.mode(), g.n_in(), g.n_out(), std::move(nodes), std::move(outputs), std::move(inputs));
}

inline void require_pcgp(const Genome& g, std::string_view op) {
    if (g.mode() != Mode::pcgp)
        throw UnsupportedOperator(std::string(op) + " is only available for PCGP genomes");
}

} // namespace detail

/// Each node gene is redrawn with probability m_node, each output gene with
/// m_output and (PCGP) each input position gene with m_input. With m_active
/// the pass is repeated on the parent until a gene of an active node changes,
/// at most kActiveRetryCap times.
inline Genome gene_mutation(const Genome& g, const MutationParams& p, const DecodeSettings& settings,
                            const FunctionSet& fset, Rng& rng) {
    bool hit = false;
    if (!p.m_active) return detail::gene_mutation_once(g, p, nullptr, rng, hit);
    const auto active = decode(g, settings, fset).active;
    Genome child;
    for (int attempt = 0; attempt < kActiveRetryCap; ++attempt) {
        child = detail::gene_mutation_once(g, p, &active, rng, hit);
        if (hit) break;
    }
    return child;
}

/// Adds delta_count(p) random nodes, truncated at size_max.
inline Genome node_addition(const Genome& g, const MutationParams& p, Rng& rng) {
    const std::size_t room = g.n_nodes() < p.bounds.size_max ? p.bounds.size_max - g.n_nodes() : 0;
    const std::size_t k = std::min(delta_count(p), room);
    std::vector<NodeGenes> added;
    for (std::size_t i = 0; i < k; ++i) added.push_back(random_node(g.mode(), rng));
    return add_nodes(g, added);
}

/// Removes delta_count(p) uniformly chosen nodes, never going below size_min.
/// With size_min = 0 and fewer nodes than that, every node is removed.
inline Genome node_deletion(const Genome& g, const MutationParams& p, Rng& rng) {
    const std::size_t spare = g.n_nodes() > p.bounds.size_min ? g.n_nodes() - p.bounds.size_min : 0;
    const std::size_t k = std::min(delta_count(p), spare);
    const auto picked = rng.sample(g.n_nodes(), k);
    return remove_nodes(g, std::set<std::size_t>(picked.begin(), picked.end()));
}

/// Connection gene that makes a node at `source` point exactly at `target`
/// (PCGP inverse of connection_position), clamped to [0,1].
inline double connection_gene_for(double target, double source, const DecodeSettings& s) {
    const double reach = s.recurrency * (1.0 - source) + source;
    return std::clamp((target - s.input_start) / (reach - s.input_start), 0.0, 1.0);
}

/// PCGP only. Adds delta_count(p) nodes (truncated at size_max) with random
/// position, function and parameter genes. Each new node's connection genes
/// point exactly at members of a pool: the new nodes left of it, plus as many
/// parent nodes left of it and as many parent inputs (at least one of each).
/// Pools are sampled without replacement when enough members exist.
inline Genome subgraph_addition(const Genome& g, const MutationParams& p, const DecodeSettings& s, Rng& rng) {
    detail::require_pcgp(g, "subgraph addition");
    const std::size_t room = g.n_nodes() < p.bounds.size_max ? p.bounds.size_max - g.n_nodes() : 0;
    const std::size_t k = std::min(delta_count(p), room);

    std::vector<NodeGenes> added(k);
    for (auto& n : added) {
        n.p = rng.uniform();
        n.f = rng.uniform();
        n.c = rng.uniform();
    }
    std::stable_sort(added.begin(), added.end(), [](const NodeGenes& a, const NodeGenes& b) { return a.p < b.p; });

    auto draw = [&](std::size_t available, std::size_t want) {
        std::vector<std::size_t> out;
        if (available == 0) return out;
        if (available >= want) return rng.sample(available, want);
        for (std::size_t i = 0; i < want; ++i) out.push_back(rng.below(available));
        return out;
    };

    const auto& parent = g.nodes();
    for (std::size_t i = 0; i < added.size(); ++i) {
        const double pi = added[i].p;
        std::vector<double> pool;
        for (std::size_t j = 0; j < i; ++j)
            if (added[j].p < pi) pool.push_back(added[j].p);
        const std::size_t want = std::max<std::size_t>(1, pool.size());
        const auto left = static_cast<std::size_t>(
            std::lower_bound(parent.begin(), parent.end(), pi,
                             [](const NodeGenes& n, double v) { return n.p < v; }) -
            parent.begin());
        for (auto j : draw(left, want)) pool.push_back(parent[j].p);
        for (auto j : draw(g.n_in(), want)) pool.push_back(g.input_positions()[j] * s.input_start);

        added[i].x = connection_gene_for(pool[rng.below(pool.size())], pi, s);
        added[i].y = connection_gene_for(pool[rng.below(pool.size())], pi, s);
    }
    return add_nodes(g, added);
}

/// PCGP only. Picks a weakly-connected component with more than one node and
/// removes up to delta_count(p) of its nodes, respecting size_min. Falls back
/// to node_deletion when every component is a singleton.
inline Genome subgraph_deletion(const Genome& g, const MutationParams& p, const DecodeSettings& s,
                                const FunctionSet& fset, Rng& rng) {
    detail::require_pcgp(g, "subgraph deletion");
    const auto graph = decode(g, s, fset);
    std::vector<const std::vector<std::size_t>*> trees;
    for (const auto& c : graph.components)
        if (c.size() > 1) trees.push_back(&c);
    if (trees.empty()) return node_deletion(g, p, rng);

    const auto& tree = *trees[rng.below(trees.size())];
    const std::size_t spare = g.n_nodes() > p.bounds.size_min ? g.n_nodes() - p.bounds.size_min : 0;
    const std::size_t k = std::min({delta_count(p), tree.size(), spare});
    std::set<std::size_t> doomed;
    for (auto i : rng.sample(tree.size(), k)) doomed.insert(tree[i]);
    return remove_nodes(g, doomed);
}

enum class MixedBranch { modify, add, remove };

/// u < m_modify: modify; u < m_modify + m_add(n): add; otherwise remove.
inline MixedBranch mixed_branch(double u, std::size_t n, const MutationParams& p) {
    if (u < p.m_modify) return MixedBranch::modify;
    if (u < p.m_modify + m_add(n, p)) return MixedBranch::add;
    return MixedBranch::remove;
}

inline Genome mixed_node_mutate(const Genome& g, const MutationParams& p, const DecodeSettings& s,
                                const FunctionSet& fset, Rng& rng) {
    switch (mixed_branch(rng.uniform(), g.n_nodes(), p)) {
    case MixedBranch::modify: return gene_mutation(g, p, s, fset, rng);
    case MixedBranch::add: return node_addition(g, p, rng);
    case MixedBranch::remove: break;
    }
    return node_deletion(g, p, rng);
}

inline Genome mixed_subgraph_mutate(const Genome& g, const MutationParams& p, const DecodeSettings& s,
                                    const FunctionSet& fset, Rng& rng) {
    detail::require_pcgp(g, "mixed subgraph mutation");
    switch (mixed_branch(rng.uniform(), g.n_nodes(), p)) {
    case MixedBranch::modify: return gene_mutation(g, p, s, fset, rng);
    case MixedBranch::add: return subgraph_addition(g, p, s, rng);
    case MixedBranch::remove: break;
    }
    return subgraph_deletion(g, p, s, fset, rng);
}

/// Applies the operator selected by p.op.
inline Genome mutate(const Genome& g, const MutationParams& p, const DecodeSettings& s, const FunctionSet& fset,
                     Rng& rng) {
    switch (p.op) {
    case MutationOp::gene: return gene_mutation(g, p, s, fset, rng);
    case MutationOp::mixed_node: return mixed_node_mutate(g, p, s, fset, rng);
    case MutationOp::mixed_subgraph: return mixed_subgraph_mutate(g, p, s, fset, rng);
    }
    throw ConfigError("unknown mutation operator");
}

} // namespace pcgp
