#pragma once

/// @file crossover.hpp
/// The six crossover operators. single_point, random_node and proportional
/// work for both CGP and PCGP; aligned_node, output_graph and subgraph rely
/// on node positions being genes and reject CGP parents.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcgp/decode.hpp"
#include "pcgp/error.hpp"
#include "pcgp/functions.hpp"
#include "pcgp/genome.hpp"
#include "pcgp/rng.hpp"

namespace pcgp {

enum class CrossoverOp { single_point, random_node, aligned_node, proportional, output_graph, subgraph };

inline std::string_view to_string(CrossoverOp op) {
    switch (op) {
    case CrossoverOp::single_point: return "single_point";
    case CrossoverOp::random_node: return "random_node";
    case CrossoverOp::aligned_node: return "aligned_node";
    case CrossoverOp::proportional: return "proportional";
    case CrossoverOp::output_graph: return "output_graph";
    case CrossoverOp::subgraph: return "subgraph";
    }
    return "?";
}

inline CrossoverOp parse_crossover_op(std::string_view s) {
    for (auto op : {CrossoverOp::single_point, CrossoverOp::random_node, CrossoverOp::aligned_node,
                    CrossoverOp::proportional, CrossoverOp::output_graph, CrossoverOp::subgraph})
        if (to_string(op) == s) return op;
    throw ConfigError("unknown crossover operator '" + std::string(s) + "'");
}

inline bool pcgp_only(CrossoverOp op) {
    return op == CrossoverOp::aligned_node || op == CrossoverOp::output_graph || op == CrossoverOp::subgraph;
}

namespace detail {

inline void require_same_shape(const Genome& a, const Genome& b) {
    if (a.mode() != b.mode() || a.n_in() != b.n_in() || a.n_out() != b.n_out())
        throw GenomeError("crossover parents differ in mode or input/output counts");
}

inline void require_pcgp_pair(const Genome& a, const Genome& b, std::string_view op) {
    require_same_shape(a, b);
    if (a.mode() != Mode::pcgp)
        throw UnsupportedOperator(std::string(op) + " crossover is only available for PCGP genomes");
}

// Per-gene pick of input and output genes from either parent.
inline std::pair<std::vector<double>, std::vector<double>> mix_io(const Genome& a, const Genome& b, Rng& rng) {
    std::vector<double> inputs(a.input_positions().size());
    for (std::size_t i = 0; i < inputs.size(); ++i)
        inputs[i] = rng.coin() ? a.input_positions()[i] : b.input_positions()[i];
    std::vector<double> outputs(a.n_out());
    for (std::size_t i = 0; i < outputs.size(); ++i) outputs[i] = rng.coin() ? a.outputs()[i] : b.outputs()[i];
    return {std::move(inputs), std::move(outputs)};
}

// Drops uniformly chosen nodes until at most size_max remain.
inline void truncate_nodes(std::vector<NodeGenes>& nodes, std::size_t size_max, Rng& rng) {
    if (nodes.size() <= size_max) return;
    auto keep = rng.sample(nodes.size(), size_max);
    std::sort(keep.begin(), keep.end());
    std::vector<NodeGenes> kept;
    kept.reserve(size_max);
    for (auto i : keep) kept.push_back(nodes[i]);
    nodes = std::move(kept);
}

} // namespace detail

/// Cut points for single_point: 0, then every node boundary of the shorter
/// flattened parent (the first one sits right after the input/output genes).
inline std::vector<std::size_t> single_point_cuts(const Genome& a, const Genome& b) {
    detail::require_same_shape(a, b);
    const std::size_t n = std::min(a.n_nodes(), b.n_nodes());
    std::vector<std::size_t> cuts{0};
    for (std::size_t k = 0; k <= n; ++k) cuts.push_back(a.header_size() + k * node_width(a.mode()));
    return cuts;
}

/// Child = first parent's genes before `cut`, second parent's genes from `cut` on.
inline Genome single_point_at(const Genome& first, const Genome& second, std::size_t cut) {
    detail::require_same_shape(first, second);
    const auto fa = first.flatten();
    const auto fb = second.flatten();
    if (cut > std::min(fa.size(), fb.size())) throw GenomeError("single point cut beyond shorter parent");
    std::vector<double> child(fa.begin(), fa.begin() + static_cast<std::ptrdiff_t>(cut));
    child.insert(child.end(), fb.begin() + static_cast<std::ptrdiff_t>(cut), fb.end());
    return Genome::unflatten(first.mode(), first.n_in(), first.n_out(), child);
}

inline Genome single_point(const Genome& a, const Genome& b, Rng& rng) {
    const auto cuts = single_point_cuts(a, b);
    const std::size_t cut = cuts[rng.below(cuts.size())];
    return rng.coin() ? single_point_at(a, b, cut) : single_point_at(b, a, cut);
}

/// floor(n_a/2) random nodes of a, then ceil(n_b/2) random nodes of b, each
/// group in its parent's order. b's picks favour indices a did not pick, so
/// crossing a genome with itself reproduces it.
inline Genome random_node(const Genome& a, const Genome& b, Rng& rng) {
    detail::require_same_shape(a, b);
    auto from_a = rng.sample(a.n_nodes(), a.n_nodes() / 2);
    const std::set<std::size_t> taken(from_a.begin(), from_a.end());
    std::vector<std::size_t> fresh, repeat;
    for (std::size_t i = 0; i < b.n_nodes(); ++i) (taken.contains(i) ? repeat : fresh).push_back(i);
    rng.shuffle(fresh);
    rng.shuffle(repeat);
    fresh.insert(fresh.end(), repeat.begin(), repeat.end());
    fresh.resize((b.n_nodes() + 1) / 2);
    std::sort(from_a.begin(), from_a.end());
    std::sort(fresh.begin(), fresh.end());

    std::vector<NodeGenes> nodes;
    for (auto i : from_a) nodes.push_back(a.nodes()[i]);
    for (auto i : fresh) nodes.push_back(b.nodes()[i]);
    auto [inputs, outputs] = detail::mix_io(a, b, rng);
    return Genome(a.mode(), a.n_in(), a.n_out(), std::move(nodes), std::move(outputs), std::move(inputs));
}

/// Greedy position pairing for aligned_node: each node of the shorter parent
/// (a on equal counts), in position order, takes the nearest still-unpaired
/// node of the other parent. Returns (index in shorter, index in longer).
inline std::vector<std::pair<std::size_t, std::size_t>> align_nodes(const Genome& shorter, const Genome& longer) {
    std::vector<bool> used(longer.n_nodes(), false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < shorter.n_nodes(); ++i) {
        const double pos = shorter.nodes()[i].p;
        std::size_t best = longer.n_nodes();
        double best_d = 0.0;
        for (std::size_t j = 0; j < longer.n_nodes(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(longer.nodes()[j].p - pos);
            if (best == longer.n_nodes() || d < best_d) {
                best = j;
                best_d = d;
            }
        }
        used[best] = true;
        pairs.emplace_back(i, best);
    }
    return pairs;
}

/// PCGP only. One node per aligned pair, each leftover node of the longer
/// parent with probability 1/2, input and output genes per gene from either.
inline Genome aligned_node(const Genome& a, const Genome& b, Rng& rng) {
    detail::require_pcgp_pair(a, b, "aligned node");
    const bool a_short = a.n_nodes() <= b.n_nodes();
    const Genome& shorter = a_short ? a : b;
    const Genome& longer = a_short ? b : a;
    const auto pairs = align_nodes(shorter, longer);

    std::vector<NodeGenes> nodes;
    std::vector<bool> paired(longer.n_nodes(), false);
    for (auto [i, j] : pairs) {
        paired[j] = true;
        nodes.push_back(rng.coin() ? shorter.nodes()[i] : longer.nodes()[j]);
    }
    for (std::size_t j = 0; j < longer.n_nodes(); ++j)
        if (!paired[j] && rng.coin()) nodes.push_back(longer.nodes()[j]);
    auto [inputs, outputs] = detail::mix_io(a, b, rng);
    return Genome(a.mode(), a.n_in(), a.n_out(), std::move(nodes), std::move(outputs), std::move(inputs));
}

/// (1 - w) a + w b, exact at w = 0, w = 1 and a = b, and never outside [min, max].
inline double blend(double a, double b, double w) {
    if (a == b) return a;
    const double v = (1.0 - w) * a + w * b;
    return std::clamp(v, std::min(a, b), std::max(a, b));
}

/// Blends the flattened parents gene by gene up to the shorter length using
/// `weights` (at least that many), then appends the longer parent's tail.
inline Genome proportional_with_weights(const Genome& a, const Genome& b, std::span<const double> weights) {
    detail::require_same_shape(a, b);
    const auto fa = a.flatten();
    const auto fb = b.flatten();
    const std::size_t common = std::min(fa.size(), fb.size());
    if (weights.size() < common)
        throw GenomeError("proportional crossover needs " + std::to_string(common) + " weights");
    std::vector<double> child(common);
    for (std::size_t i = 0; i < common; ++i) child[i] = blend(fa[i], fb[i], weights[i]);
    const auto& longer = fa.size() > fb.size() ? fa : fb;
    child.insert(child.end(), longer.begin() + static_cast<std::ptrdiff_t>(common), longer.end());
    return Genome::unflatten(a.mode(), a.n_in(), a.n_out(), child);
}

inline Genome proportional(const Genome& a, const Genome& b, Rng& rng) {
    detail::require_same_shape(a, b);
    std::vector<double> w(std::min(a.gene_count(), b.gene_count()));
    for (auto& v : w) v = rng.uniform();
    return proportional_with_weights(a, b, w);
}

/// PCGP only. Each output comes from a or b with probability 1/2; the child
/// keeps every node on the arity-ignoring traces of the outputs taken from
/// each parent. An input used by only one parent's selected traces comes from
/// that parent, otherwise from either. Truncated at size_max.
inline Genome output_graph(const Genome& a, const Genome& b, const DecodeSettings& s, const FunctionSet& fset,
                           std::size_t size_max, Rng& rng) {
    detail::require_pcgp_pair(a, b, "output graph");
    const auto ga = decode(a, s, fset);
    const auto gb = decode(b, s, fset);

    std::vector<std::size_t> outs_a, outs_b;
    std::vector<double> outputs(a.n_out());
    for (std::size_t o = 0; o < a.n_out(); ++o) {
        if (rng.coin()) {
            outs_a.push_back(o);
            outputs[o] = a.outputs()[o];
        } else {
            outs_b.push_back(o);
            outputs[o] = b.outputs()[o];
        }
    }
    auto traced = [](const DecodedGraph& g, const std::vector<std::size_t>& outs) {
        std::set<std::size_t> nodes;
        for (auto o : outs)
            for (auto n : output_trace(g, o, false)) nodes.insert(n);
        return std::vector<std::size_t>(nodes.begin(), nodes.end());
    };
    const auto na = traced(ga, outs_a);
    const auto nb = traced(gb, outs_b);

    std::vector<NodeGenes> nodes;
    for (auto i : na) nodes.push_back(a.nodes()[i]);
    for (auto i : nb) nodes.push_back(b.nodes()[i]);
    detail::truncate_nodes(nodes, size_max, rng);

    const auto used_a = inputs_used(ga, na, outs_a, false);
    const auto used_b = inputs_used(gb, nb, outs_b, false);
    std::vector<double> inputs(a.n_in());
    for (std::size_t k = 0; k < a.n_in(); ++k) {
        if (used_a[k] != used_b[k])
            inputs[k] = used_a[k] ? a.input_positions()[k] : b.input_positions()[k];
        else
            inputs[k] = rng.coin() ? a.input_positions()[k] : b.input_positions()[k];
    }
    return Genome(a.mode(), a.n_in(), a.n_out(), std::move(nodes), std::move(outputs), std::move(inputs));
}

/// Subgraph crossover with the random choices supplied: `pick_a`/`pick_b` flag
/// the weakly-connected components (in decode order) kept from each parent,
/// `io_from_a` flags, per flattened input/output gene, whether it comes from a.
inline Genome subgraph_with_selection(const Genome& a, const Genome& b, const DecodeSettings& s,
                                      const FunctionSet& fset, std::size_t size_max, const std::vector<bool>& pick_a,
                                      const std::vector<bool>& pick_b, const std::vector<bool>& io_from_a,
                                      Rng& rng) {
    detail::require_pcgp_pair(a, b, "subgraph");
    const auto ga = decode(a, s, fset);
    const auto gb = decode(b, s, fset);
    if (pick_a.size() != ga.components.size() || pick_b.size() != gb.components.size() ||
        io_from_a.size() != a.header_size())
        throw GenomeError("subgraph selection does not match parents");

    std::vector<NodeGenes> nodes;
    auto take = [&](const Genome& g, const DecodedGraph& dg, const std::vector<bool>& pick) {
        std::vector<std::size_t> idx;
        for (std::size_t c = 0; c < dg.components.size(); ++c)
            if (pick[c]) idx.insert(idx.end(), dg.components[c].begin(), dg.components[c].end());
        std::sort(idx.begin(), idx.end());
        for (auto i : idx) nodes.push_back(g.nodes()[i]);
    };
    take(a, ga, pick_a);
    take(b, gb, pick_b);
    detail::truncate_nodes(nodes, size_max, rng);

    std::vector<double> inputs(a.n_in()), outputs(a.n_out());
    for (std::size_t k = 0; k < a.n_in(); ++k) inputs[k] = io_from_a[k] ? a.input_positions()[k] : b.input_positions()[k];
    for (std::size_t k = 0; k < a.n_out(); ++k)
        outputs[k] = io_from_a[a.n_in() + k] ? a.outputs()[k] : b.outputs()[k];
    return Genome(a.mode(), a.n_in(), a.n_out(), std::move(nodes), std::move(outputs), std::move(inputs));
}

/// PCGP only. Every component of either parent is kept with probability 1/2.
inline Genome subgraph(const Genome& a, const Genome& b, const DecodeSettings& s, const FunctionSet& fset,
                       std::size_t size_max, Rng& rng) {
    detail::require_pcgp_pair(a, b, "subgraph");
    const auto ca = decode(a, s, fset).components.size();
    const auto cb = decode(b, s, fset).components.size();
    std::vector<bool> pick_a(ca), pick_b(cb), io(a.header_size());
    for (std::size_t i = 0; i < ca; ++i) pick_a[i] = rng.coin();
    for (std::size_t i = 0; i < cb; ++i) pick_b[i] = rng.coin();
    for (std::size_t i = 0; i < io.size(); ++i) io[i] = rng.coin();
    return subgraph_with_selection(a, b, s, fset, size_max, pick_a, pick_b, io, rng);
}

/// Applies `op`. PCGP-only operators throw UnsupportedOperator for CGP parents.
inline Genome crossover(CrossoverOp op, const Genome& a, const Genome& b, const DecodeSettings& s,
                        const FunctionSet& fset, std::size_t size_max, Rng& rng) {
    switch (op) {
    case CrossoverOp::single_point: return single_point(a, b, rng);
    case CrossoverOp::random_node: return random_node(a, b, rng);
    case CrossoverOp::aligned_node: return aligned_node(a, b, rng);
    case CrossoverOp::proportional: return proportional(a, b, rng);
    case CrossoverOp::output_graph: return output_graph(a, b, s, fset, size_max, rng);
    case CrossoverOp::subgraph: return subgraph(a, b, s, fset, size_max, rng);
    }
    throw ConfigError("unknown crossover operator");
}

} // namespace pcgp
