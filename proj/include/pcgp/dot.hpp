#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include "pcgp/decode.hpp"
#include "pcgp/functions.hpp"
#include "pcgp/genome.hpp"

namespace pcgp {

/// Graphviz rendering of a decoded genome.
///
/// Inputs are boxes, outputs double circles, nodes ellipses labelled with
/// their function (and weight when weights are on). Inactive nodes and
/// recurrent edges are dashed. Only the connections a node's function reads
/// are drawn.
inline std::string to_dot(const Genome& g, const DecodedGraph& graph, const FunctionSet& fset,
                          const DecodeSettings& s) {
    auto id = [&](std::size_t unified) {
        return graph.is_input(unified) ? "in" + std::to_string(unified) : "n" + std::to_string(graph.node_of(unified));
    };
    std::ostringstream os;
    os << "digraph program {\n  rankdir=LR;\n";
    for (std::size_t k = 0; k < graph.n_in; ++k) os << "  in" << k << " [shape=box, label=\"in" << k << "\"];\n";
    for (std::size_t j = 0; j < graph.n_nodes(); ++j) {
        std::string label = fset[graph.function_index[j]].name;
        if (s.weights) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "\\nw=%.3g", g.nodes()[j].c);
            label += buf;
        }
        os << "  n" << j << " [shape=ellipse, label=\"" << label << '"';
        if (!graph.active[j]) os << ", style=dashed";
        os << "];\n";
    }
    for (std::size_t k = 0; k < graph.n_out; ++k)
        os << "  out" << k << " [shape=doublecircle, label=\"out" << k << "\"];\n";
    for (std::size_t j = 0; j < graph.n_nodes(); ++j)
        for (int k = 0; k < graph.arity[j]; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            os << "  " << id(graph.targets[j][kk]) << " -> n" << j;
            if (graph.recurrent[j][kk]) os << " [style=dashed]";
            os << ";\n";
        }
    for (std::size_t k = 0; k < graph.n_out; ++k) os << "  " << id(graph.output_targets[k]) << " -> out" << k << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace pcgp
