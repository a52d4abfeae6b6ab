#pragma once

/// @file genome.hpp
/// Gene-vector representation of floating-point CGP and positional CGP
/// individuals, plus the structural edits that do not need decoding.
///
/// Every gene is a double in [0, 1]. A CGP node carries (x, y, f, c); a PCGP
/// node additionally carries its position gene p, and a PCGP genome carries
/// one position gene per program input. PCGP nodes are always stored sorted
/// by position (stable, so equal positions keep their prior order).
///
/// Flattened layout, used by serialization order and by the crossovers that
/// work on raw gene vectors:
///
///     [input genes (PCGP)] [output genes] [node 0: (p,) x, y, f, c] [node 1] ...

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pcgp/error.hpp"
#include "pcgp/rng.hpp"

namespace pcgp {

enum class Mode { cgp, pcgp };

inline std::string_view to_string(Mode m) { return m == Mode::cgp ? "cgp" : "pcgp"; }

inline Mode parse_mode(std::string_view s) {
    if (s == "cgp") return Mode::cgp;
    if (s == "pcgp") return Mode::pcgp;
    throw ParseError("unknown genome mode '" + std::string(s) + "' (expected cgp or pcgp)");
}

struct NodeGenes {
    double p = 0.0; // position, PCGP only; always 0 in CGP
    double x = 0.0;
    double y = 0.0;
    double f = 0.0;
    double c = 0.0;

    friend bool operator==(const NodeGenes&, const NodeGenes&) = default;
};

struct SizeBounds {
    std::size_t size_min = 0;
    std::size_t size_max = 0;

    bool contains(std::size_t n) const { return n >= size_min && n <= size_max; }
    friend bool operator==(const SizeBounds&, const SizeBounds&) = default;
};

inline bool gene_in_range(double v) { return v >= 0.0 && v <= 1.0; }

/// Genes per computational node for a mode.
constexpr std::size_t node_width(Mode m) { return m == Mode::pcgp ? 5 : 4; }

class Genome {
  public:
    Genome() = default;

    /// Validates every invariant. PCGP nodes are stable-sorted by position.
    Genome(Mode mode, std::size_t n_in, std::size_t n_out, std::vector<NodeGenes> nodes,
           std::vector<double> outputs, std::vector<double> input_positions = {})
        : mode_(mode), n_in_(n_in), n_out_(n_out), nodes_(std::move(nodes)),
          outputs_(std::move(outputs)), inputs_(std::move(input_positions)) {
        if (n_in_ == 0) throw GenomeError("genome needs at least one input");
        if (n_out_ == 0) throw GenomeError("genome needs at least one output");
        if (outputs_.size() != n_out_)
            throw GenomeError("expected " + std::to_string(n_out_) + " output genes, got " +
                              std::to_string(outputs_.size()));
        const std::size_t want_inputs = mode_ == Mode::pcgp ? n_in_ : 0;
        if (inputs_.size() != want_inputs)
            throw GenomeError("expected " + std::to_string(want_inputs) + " input position genes, got " +
                              std::to_string(inputs_.size()));
        for (double v : outputs_)
            if (!gene_in_range(v)) throw GenomeError("output gene outside [0,1]");
        for (double v : inputs_)
            if (!gene_in_range(v)) throw GenomeError("input position gene outside [0,1]");
        for (const auto& n : nodes_) {
            if (mode_ == Mode::cgp && n.p != 0.0) throw GenomeError("CGP node carries a position gene");
            if (!gene_in_range(n.p) || !gene_in_range(n.x) || !gene_in_range(n.y) || !gene_in_range(n.f) ||
                !gene_in_range(n.c))
                throw GenomeError("node gene outside [0,1]");
        }
        if (mode_ == Mode::pcgp)
            std::stable_sort(nodes_.begin(), nodes_.end(),
                             [](const NodeGenes& a, const NodeGenes& b) { return a.p < b.p; });
    }

    Mode mode() const { return mode_; }
    std::size_t n_in() const { return n_in_; }
    std::size_t n_out() const { return n_out_; }
    std::size_t n_nodes() const { return nodes_.size(); }
    const std::vector<NodeGenes>& nodes() const { return nodes_; }
    const NodeGenes& node(std::size_t i) const { return nodes_.at(i); }
    const std::vector<double>& outputs() const { return outputs_; }
    const std::vector<double>& input_positions() const { return inputs_; }

    std::size_t header_size() const { return inputs_.size() + outputs_.size(); }
    std::size_t gene_count() const { return header_size() + nodes_.size() * node_width(mode_); }

    /// Flattened gene vector in the fixed layout.
    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(gene_count());
        out.insert(out.end(), inputs_.begin(), inputs_.end());
        out.insert(out.end(), outputs_.begin(), outputs_.end());
        for (const auto& n : nodes_) {
            if (mode_ == Mode::pcgp) out.push_back(n.p);
            out.insert(out.end(), {n.x, n.y, n.f, n.c});
        }
        return out;
    }

    /// Inverse of flatten. The node block length must be a multiple of the node width.
    static Genome unflatten(Mode mode, std::size_t n_in, std::size_t n_out, std::span<const double> genes) {
        const std::size_t n_inputs = mode == Mode::pcgp ? n_in : 0;
        const std::size_t header = n_inputs + n_out;
        const std::size_t width = node_width(mode);
        if (genes.size() < header || (genes.size() - header) % width != 0)
            throw GenomeError("gene vector length " + std::to_string(genes.size()) + " does not match layout");
        std::vector<double> inputs(genes.begin(), genes.begin() + static_cast<std::ptrdiff_t>(n_inputs));
        std::vector<double> outputs(genes.begin() + static_cast<std::ptrdiff_t>(n_inputs),
                                    genes.begin() + static_cast<std::ptrdiff_t>(header));
        std::vector<NodeGenes> nodes;
        for (std::size_t at = header; at < genes.size(); at += width) {
            NodeGenes n;
            std::size_t k = at;
            if (mode == Mode::pcgp) n.p = genes[k++];
            n.x = genes[k++];
            n.y = genes[k++];
            n.f = genes[k++];
            n.c = genes[k];
            nodes.push_back(n);
        }
        return Genome(mode, n_in, n_out, std::move(nodes), std::move(outputs), std::move(inputs));
    }

    friend bool operator==(const Genome&, const Genome&) = default;

  private:
    Mode mode_ = Mode::cgp;
    std::size_t n_in_ = 1;
    std::size_t n_out_ = 1;
    std::vector<NodeGenes> nodes_;
    std::vector<double> outputs_;
    std::vector<double> inputs_;
};

inline NodeGenes random_node(Mode mode, Rng& rng) {
    NodeGenes n;
    if (mode == Mode::pcgp) n.p = rng.uniform();
    n.x = rng.uniform();
    n.y = rng.uniform();
    n.f = rng.uniform();
    n.c = rng.uniform();
    return n;
}

/// Every gene drawn uniformly on [0,1], in layout order.
inline Genome random_genome(Mode mode, std::size_t n_in, std::size_t n_out, std::size_t n_nodes, Rng& rng) {
    if (n_in == 0 || n_out == 0) throw GenomeError("genome needs at least one input and one output");
    std::vector<double> inputs;
    if (mode == Mode::pcgp)
        for (std::size_t i = 0; i < n_in; ++i) inputs.push_back(rng.uniform());
    std::vector<double> outputs;
    for (std::size_t i = 0; i < n_out; ++i) outputs.push_back(rng.uniform());
    std::vector<NodeGenes> nodes;
    nodes.reserve(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) nodes.push_back(random_node(mode, rng));
    return Genome(mode, n_in, n_out, std::move(nodes), std::move(outputs), std::move(inputs));
}

/// Position of an addressable index (inputs first, then computational nodes).
///
/// CGP places all n_in + n_nodes rungs at cell centers (k + 0.5) / K.
/// PCGP uses the node's p gene, and i_k * input_start for input k.
inline double node_position(const Genome& g, std::size_t index, double input_start = -1.0) {
    const std::size_t total = g.n_in() + g.n_nodes();
    if (index >= total)
        throw GenomeError("position index " + std::to_string(index) + " out of range (" + std::to_string(total) +
                          " addressable)");
    if (g.mode() == Mode::cgp) return (static_cast<double>(index) + 0.5) / static_cast<double>(total);
    if (index < g.n_in()) return g.input_positions()[index] * input_start;
    return g.nodes()[index - g.n_in()].p;
}

/// Appends nodes (CGP) or merges them by position (PCGP).
inline Genome add_nodes(const Genome& g, std::span<const NodeGenes> added,
                        std::optional<std::size_t> size_max = std::nullopt) {
    if (size_max && g.n_nodes() + added.size() > *size_max)
        throw SizeError("adding " + std::to_string(added.size()) + " nodes to " + std::to_string(g.n_nodes()) +
                        " exceeds size_max " + std::to_string(*size_max));
    std::vector<NodeGenes> nodes = g.nodes();
    nodes.insert(nodes.end(), added.begin(), added.end());
    return Genome(g.mode(), g.n_in(), g.n_out(), std::move(nodes), g.outputs(), g.input_positions());
}

inline Genome remove_nodes(const Genome& g, const std::set<std::size_t>& indices) {
    if (!indices.empty() && *indices.rbegin() >= g.n_nodes())
        throw GenomeError("node index " + std::to_string(*indices.rbegin()) + " out of range");
    std::vector<NodeGenes> nodes;
    nodes.reserve(g.n_nodes() - indices.size());
    for (std::size_t i = 0; i < g.n_nodes(); ++i)
        if (!indices.contains(i)) nodes.push_back(g.nodes()[i]);
    return Genome(g.mode(), g.n_in(), g.n_out(), std::move(nodes), g.outputs(), g.input_positions());
}

/// Same genome with a different node list (validated and re-sorted).
inline Genome with_nodes(const Genome& g, std::vector<NodeGenes> nodes) {
    return Genome(g.mode(), g.n_in(), g.n_out(), std::move(nodes), g.outputs(), g.input_positions());
}

/// Throws GenomeError when an invariant does not hold. Genomes built through
/// the constructor always pass; this exists for tests and external data.
inline void validate(const Genome& g) {
    Genome copy(g.mode(), g.n_in(), g.n_out(), g.nodes(), g.outputs(), g.input_positions());
    if (g.mode() == Mode::pcgp && !(copy.nodes() == g.nodes()))
        throw GenomeError("PCGP nodes are not sorted by position");
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline void write_number(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

inline void write_array(std::ostream& os, std::span<const double> values) {
    os << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ", ";
        write_number(os, values[i]);
    }
    os << ']';
}

inline std::vector<double> read_genes(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ParseError(std::string(what) + " contains a non-number");
        const double d = v.get<double>();
        if (!gene_in_range(d)) throw ParseError(std::string(what) + " gene " + v.dump() + " outside [0,1]");
        out.push_back(d);
    }
    return out;
}

} // namespace detail

/// One JSON document; numbers printed with 17 significant digits.
inline std::string serialize(const Genome& g) {
    std::ostringstream os;
    os << "{\n  \"mode\": \"" << to_string(g.mode()) << "\",\n";
    os << "  \"n_in\": " << g.n_in() << ",\n  \"n_out\": " << g.n_out() << ",\n";
    if (g.mode() == Mode::pcgp) {
        os << "  \"inputs\": ";
        detail::write_array(os, g.input_positions());
        os << ",\n";
    }
    os << "  \"outputs\": ";
    detail::write_array(os, g.outputs());
    os << ",\n  \"nodes\": [";
    for (std::size_t i = 0; i < g.n_nodes(); ++i) {
        const auto& n = g.nodes()[i];
        os << (i ? ",\n    " : "\n    ");
        if (g.mode() == Mode::pcgp)
            detail::write_array(os, std::vector<double>{n.p, n.x, n.y, n.f, n.c});
        else
            detail::write_array(os, std::vector<double>{n.x, n.y, n.f, n.c});
    }
    os << (g.n_nodes() ? "\n  ]\n}\n" : "]\n}\n");
    return os.str();
}

inline Genome genome_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw ParseError("genome document must be a JSON object");
        const Mode mode = parse_mode(j.at("mode").get<std::string>());
        const auto n_in = j.at("n_in").get<std::size_t>();
        const auto n_out = j.at("n_out").get<std::size_t>();
        std::vector<double> inputs;
        if (mode == Mode::pcgp) inputs = detail::read_genes(j.at("inputs"), "inputs");
        std::vector<double> outputs = detail::read_genes(j.at("outputs"), "outputs");
        std::vector<NodeGenes> nodes;
        const auto& jn = j.at("nodes");
        if (!jn.is_array()) throw ParseError("nodes must be an array");
        for (const auto& entry : jn) {
            auto genes = detail::read_genes(entry, "node");
            if (genes.size() != node_width(mode))
                throw ParseError("node has " + std::to_string(genes.size()) + " genes, expected " +
                                 std::to_string(node_width(mode)));
            NodeGenes n;
            std::size_t k = 0;
            if (mode == Mode::pcgp) n.p = genes[k++];
            n.x = genes[k++];
            n.y = genes[k++];
            n.f = genes[k++];
            n.c = genes[k];
            nodes.push_back(n);
        }
        Genome g(mode, n_in, n_out, std::move(nodes), std::move(outputs), std::move(inputs));
        validate(g);
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed genome document: ") + e.what());
    } catch (const GenomeError& e) {
        throw ParseError(std::string("invalid genome: ") + e.what());
    }
}

inline Genome deserialize(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed genome document: ") + e.what());
    }
    return genome_from_json(j);
}

} // namespace pcgp
