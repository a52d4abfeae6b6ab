#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pcgp/decode.hpp"
#include "pcgp/error.hpp"
#include "pcgp/functions.hpp"
#include "pcgp/genome.hpp"

namespace pcgp {

/// Recurrent memory: last computed value of every computational node.
struct ProgramState {
    std::vector<double> node_values;

    ProgramState() = default;
    explicit ProgramState(std::size_t n_nodes) : node_values(n_nodes, 0.0) {}

    void reset() { std::fill(node_values.begin(), node_values.end(), 0.0); }
};

/// Runs one time step of a decoded program.
///
/// Nodes are computed in stored order and written into `state` in place, so a
/// read of an earlier node sees this step's value while a read of the node
/// itself or of a later node sees the previous step's value. With r = 0 only
/// earlier nodes are reachable and the step is stateless.
///
/// `active_only` skips inactive nodes; their state entries keep their old value.
inline void step(const DecodedGraph& graph, const Genome& genome, const FunctionSet& fset,
                 const DecodeSettings& settings, ProgramState& state, std::span<const double> inputs,
                 std::span<double> outputs, bool active_only = false) {
    if (inputs.size() != graph.n_in)
        throw Error("expected " + std::to_string(graph.n_in) + " inputs, got " + std::to_string(inputs.size()));
    if (outputs.size() != graph.n_out)
        throw Error("expected room for " + std::to_string(graph.n_out) + " outputs, got " +
                    std::to_string(outputs.size()));
    if (state.node_values.size() != graph.n_nodes()) state = ProgramState(graph.n_nodes());

    auto& values = state.node_values;
    auto read = [&](std::size_t unified) {
        return graph.is_input(unified) ? inputs[unified] : values[graph.node_of(unified)];
    };
    for (std::size_t j = 0; j < graph.n_nodes(); ++j) {
        if (active_only && !graph.active[j]) continue;
        const auto& fn = fset[graph.function_index[j]];
        const double c = genome.nodes()[j].c;
        const double a = fn.arity >= 1 ? read(graph.targets[j][0]) : 0.0;
        const double b = fn.arity >= 2 ? read(graph.targets[j][1]) : 0.0;
        double v = fn.fn(a, b, c);
        if (settings.weights) v *= c;
        values[j] = std::isfinite(v) ? v : 0.0;
    }
    for (std::size_t o = 0; o < graph.n_out; ++o) outputs[o] = read(graph.output_targets[o]);
}

/// Decoded program bundled with its own state. `fset` must outlive the Program.
class Program {
  public:
    Program(const Genome& genome, const DecodeSettings& settings, const FunctionSet& fset)
        : genome_(genome), settings_(settings), fset_(fset), graph_(decode(genome, settings, fset)),
          state_(graph_.n_nodes()), out_(graph_.n_out) {}

    const DecodedGraph& graph() const { return graph_; }
    const ProgramState& state() const { return state_; }

    std::span<const double> step(std::span<const double> inputs, bool active_only = false) {
        pcgp::step(graph_, genome_, fset_, settings_, state_, inputs, out_, active_only);
        return out_;
    }

    void reset() { state_.reset(); }

  private:
    Genome genome_;
    DecodeSettings settings_;
    const FunctionSet& fset_;
    DecodedGraph graph_;
    ProgramState state_;
    std::vector<double> out_;
};

} // namespace pcgp
