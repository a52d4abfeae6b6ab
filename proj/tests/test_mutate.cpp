#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "pcgp/mutate.hpp"

using namespace pcgp;

namespace {

const FunctionSet& fset() {
    static const FunctionSet f = FunctionSet::standard();
    return f;
}

constexpr double kAddGene = 0.0;
const DecodeSettings kFeedforward{0.0, -0.5, false};

MutationParams params(std::size_t size_min, std::size_t size_max, double m_delta = 0.1, double m_modify = 0.5) {
    MutationParams p;
    p.bounds = {size_min, size_max};
    p.m_delta = m_delta;
    p.m_modify = m_modify;
    return p;
}

// PCGP genome, one input at -0.5, nodes at `pos`; links[j] lists the
// positions node j's x and y point at (r = 0, I_start = -0.5).
Genome linked_pcgp(const std::vector<double>& pos, const std::vector<std::pair<double, double>>& links) {
    std::vector<NodeGenes> nodes;
    for (std::size_t j = 0; j < pos.size(); ++j)
        nodes.push_back({pos[j], connection_gene_for(links[j].first, pos[j], kFeedforward),
                         connection_gene_for(links[j].second, pos[j], kFeedforward), kAddGene, 0.5});
    return Genome(Mode::pcgp, 1, 1, nodes, {1.0}, {1.0});
}

bool within_3_sigma(std::size_t hits, std::size_t n, double p) {
    const double mean = static_cast<double>(n) * p;
    const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    return std::abs(static_cast<double>(hits) - mean) <= 3.0 * sd;
}

} // namespace

TEST(GeneMutation, ZeroRatesIsIdentity) {
    Rng rng(31);
    MutationParams p;
    p.m_node = p.m_output = p.m_input = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto g = random_genome(t % 2 ? Mode::pcgp : Mode::cgp, 2, 2, rng.below(20), rng);
        EXPECT_EQ(gene_mutation(g, p, kFeedforward, fset(), rng), g);
    }
}

TEST(GeneMutation, ChangeRateIsBinomial) {
    Rng rng(32);
    const auto g = random_genome(Mode::cgp, 1, 1, 2500, rng); // 10^4 node genes
    for (double rate : {0.1, 0.3, 0.7}) {
        MutationParams p;
        p.m_node = rate;
        p.m_output = 0.0;
        const auto child = gene_mutation(g, p, kFeedforward, fset(), rng);
        std::size_t changed = 0;
        for (std::size_t j = 0; j < g.n_nodes(); ++j) {
            const auto &a = g.nodes()[j], &b = child.nodes()[j];
            changed += (a.x != b.x) + (a.y != b.y) + (a.f != b.f) + (a.c != b.c);
        }
        EXPECT_TRUE(within_3_sigma(changed, 10000, rate)) << "rate " << rate << " changed " << changed;
    }
}

TEST(GeneMutation, OutputAndInputRates) {
    Rng rng(33);
    const auto g = random_genome(Mode::pcgp, 2000, 2000, 0, rng);
    MutationParams p;
    p.m_node = 0.0;
    p.m_output = 0.2;
    p.m_input = 0.6;
    const auto child = gene_mutation(g, p, kFeedforward, fset(), rng);
    std::size_t outs = 0, ins = 0;
    for (std::size_t i = 0; i < 2000; ++i) {
        outs += g.outputs()[i] != child.outputs()[i];
        ins += g.input_positions()[i] != child.input_positions()[i];
    }
    EXPECT_TRUE(within_3_sigma(outs, 2000, 0.2)) << outs;
    EXPECT_TRUE(within_3_sigma(ins, 2000, 0.6)) << ins;
}

TEST(GeneMutation, ActiveFlagHitsActiveNode) {
    Rng rng(34);
    int checked = 0;
    for (int t = 0; t < 300; ++t) {
        const auto g = random_genome(t % 2 ? Mode::pcgp : Mode::cgp, 2, 1, 20, rng);
        const auto graph = decode(g, kFeedforward, fset());
        if (graph.active_count() == 0) continue;
        ++checked;
        MutationParams p;
        p.m_node = 0.02;
        p.m_active = true;
        const auto child = gene_mutation(g, p, kFeedforward, fset(), rng);
        // Positions may re-sort PCGP nodes, so compare as multisets of active genes.
        std::multiset<std::tuple<double, double, double, double, double>> after;
        for (const auto& n : child.nodes()) after.insert({n.p, n.x, n.y, n.f, n.c});
        bool some_active_gone = false;
        for (std::size_t j = 0; j < g.n_nodes(); ++j) {
            const auto& n = g.nodes()[j];
            if (graph.active[j] && !after.contains({n.p, n.x, n.y, n.f, n.c})) some_active_gone = true;
        }
        EXPECT_TRUE(some_active_gone);
    }
    EXPECT_GT(checked, 50);
}

TEST(GeneMutation, ActiveFlagTerminatesWithoutActiveNodes) {
    Rng rng(35);
    const Genome g(Mode::cgp, 1, 1, {NodeGenes{0, 0.5, 0.5, 0.5, 0.5}}, {0.0});
    MutationParams p;
    p.m_node = 0.1;
    p.m_active = true;
    EXPECT_EQ(gene_mutation(g, p, kFeedforward, fset(), rng).n_nodes(), 1u);
}

TEST(DeltaCount, Rounding) {
    EXPECT_EQ(delta_count(params(10, 100, 0.2)), 2u);
    EXPECT_EQ(delta_count(params(5, 100, 0.1)), 1u);
    EXPECT_EQ(delta_count(params(0, 100, 0.5)), 1u);
    EXPECT_EQ(delta_count(params(40, 100, 0.5)), 20u);
}

TEST(NodeAddition, Examples) {
    Rng rng(36);
    const auto g = random_genome(Mode::pcgp, 1, 1, 10, rng);
    EXPECT_EQ(node_addition(g, params(10, 20, 0.2), rng).n_nodes(), 12u);
    EXPECT_EQ(node_addition(g, params(10, 10, 0.2), rng).n_nodes(), 10u);
    EXPECT_EQ(node_addition(g, params(10, 11, 0.2), rng).n_nodes(), 11u);
    EXPECT_EQ(node_addition(g, params(5, 20, 0.1), rng).n_nodes(), 11u);
    const auto added = node_addition(g, params(10, 20, 0.5), rng);
    EXPECT_TRUE(std::is_sorted(added.nodes().begin(), added.nodes().end(),
                               [](const NodeGenes& a, const NodeGenes& b) { return a.p < b.p; }));
}

TEST(NodeDeletion, Examples) {
    Rng rng(37);
    const auto twelve = random_genome(Mode::cgp, 1, 1, 12, rng);
    EXPECT_EQ(node_deletion(twelve, params(10, 20, 0.2), rng).n_nodes(), 10u);
    const auto ten = random_genome(Mode::cgp, 1, 1, 10, rng);
    EXPECT_EQ(node_deletion(ten, params(10, 20, 0.2), rng), ten);
    const auto one = random_genome(Mode::cgp, 1, 1, 1, rng);
    EXPECT_EQ(node_deletion(one, params(0, 20, 0.5), rng).n_nodes(), 0u);
}

TEST(NodeDeletion, SurvivorsKeepOrder) {
    Rng rng(38);
    const auto g = random_genome(Mode::cgp, 1, 1, 30, rng);
    const auto child = node_deletion(g, params(20, 40, 0.25), rng);
    ASSERT_EQ(child.n_nodes(), 25u);
    std::size_t j = 0;
    for (const auto& n : child.nodes()) {
        while (j < g.n_nodes() && !(g.nodes()[j] == n)) ++j;
        ASSERT_LT(j, g.n_nodes());
        ++j;
    }
}

TEST(MAdd, Values) {
    const auto p = params(10, 40, 0.1, 0.6);
    EXPECT_EQ(m_add(10, p), 0.0);
    EXPECT_EQ(m_add(40, p), 1.0 - 0.6);
    EXPECT_NEAR(m_add(25, p), 0.2, 1e-15);
    EXPECT_EQ(m_add(10, params(10, 10)), 0.0);
    auto inv = p;
    inv.m_add_inverted = true;
    EXPECT_EQ(m_add(10, inv), 1.0 - 0.6);
    EXPECT_EQ(m_add(40, inv), 0.0);
}

TEST(MAdd, EndpointsExactOverGrid) {
    for (std::size_t lo : {0u, 1u, 7u, 25u})
        for (std::size_t span : {1u, 3u, 50u})
            for (int m = 1; m <= 9; ++m) {
                const auto p = params(lo, lo + span, 0.1, m / 10.0);
                EXPECT_EQ(m_add(lo, p), 0.0);
                EXPECT_EQ(m_add(lo + span, p), 1.0 - m / 10.0);
            }
}

TEST(MixedBranch, Thresholds) {
    const auto p = params(10, 40, 0.1, 0.6);
    EXPECT_EQ(mixed_branch(0.0, 25, p), MixedBranch::modify);
    EXPECT_EQ(mixed_branch(0.59, 25, p), MixedBranch::modify);
    EXPECT_EQ(mixed_branch(0.6, 25, p), MixedBranch::add);
    EXPECT_EQ(mixed_branch(0.79, 25, p), MixedBranch::add);
    EXPECT_EQ(mixed_branch(0.81, 25, p), MixedBranch::remove);
}

TEST(MixedNodeMutate, AlwaysModifyIsGeneMutation) {
    Rng rng(39);
    const auto g = random_genome(Mode::cgp, 2, 1, 20, rng);
    auto p = params(10, 40, 0.1, 1.0);
    for (int t = 0; t < 200; ++t) EXPECT_EQ(mixed_node_mutate(g, p, kFeedforward, fset(), rng).n_nodes(), 20u);
}

TEST(MixedNodeMutate, AtSizeMinNeverShrinks) {
    Rng rng(40);
    const auto g = random_genome(Mode::cgp, 2, 1, 10, rng);
    const auto p = params(10, 30, 0.2, 0.1);
    for (int t = 0; t < 500; ++t) {
        const auto n = mixed_node_mutate(g, p, kFeedforward, fset(), rng).n_nodes();
        EXPECT_EQ(n, 10u); // m_add = 0, removal truncated
    }
}

TEST(MixedNodeMutate, BranchFrequenciesAreMultinomial) {
    Rng rng(41);
    const auto g = random_genome(Mode::cgp, 1, 1, 25, rng);
    const auto p = params(10, 40, 0.1, 0.6); // k = 1, m_add(25) = 0.2
    std::size_t modify = 0, add = 0, remove = 0;
    constexpr std::size_t draws = 10000;
    for (std::size_t t = 0; t < draws; ++t) {
        const auto n = mixed_node_mutate(g, p, kFeedforward, fset(), rng).n_nodes();
        if (n == 25) ++modify;
        else if (n == 26) ++add;
        else if (n == 24) ++remove;
    }
    EXPECT_EQ(modify + add + remove, draws);
    EXPECT_TRUE(within_3_sigma(modify, draws, 0.6)) << modify;
    EXPECT_TRUE(within_3_sigma(add, draws, 0.2)) << add;
    EXPECT_TRUE(within_3_sigma(remove, draws, 0.2)) << remove;
}

TEST(MixedSubgraphMutate, BranchFrequenciesAreMultinomial) {
    Rng rng(42);
    const auto g = random_genome(Mode::pcgp, 1, 1, 25, rng);
    const auto p = params(10, 40, 0.1, 0.6);
    std::size_t modify = 0, add = 0, remove = 0;
    constexpr std::size_t draws = 10000;
    for (std::size_t t = 0; t < draws; ++t) {
        const auto n = mixed_subgraph_mutate(g, p, kFeedforward, fset(), rng).n_nodes();
        if (n == 25) ++modify;
        else if (n == 26) ++add;
        else if (n == 24) ++remove;
    }
    EXPECT_EQ(modify + add + remove, draws);
    EXPECT_TRUE(within_3_sigma(modify, draws, 0.6)) << modify;
    EXPECT_TRUE(within_3_sigma(add, draws, 0.2)) << add;
    EXPECT_TRUE(within_3_sigma(remove, draws, 0.2)) << remove;
}

TEST(MixedSubgraphMutate, Examples) {
    Rng rng(43);
    const auto g = random_genome(Mode::pcgp, 2, 1, 10, rng);
    for (int t = 0; t < 100; ++t) {
        EXPECT_EQ(mixed_subgraph_mutate(g, params(10, 30, 0.2, 1.0), kFeedforward, fset(), rng).n_nodes(), 10u);
        EXPECT_EQ(mixed_subgraph_mutate(g, params(10, 30, 0.2, 0.1), kFeedforward, fset(), rng).n_nodes(), 10u);
    }
}

TEST(SubgraphOperators, RejectCgp) {
    Rng rng(44);
    const auto g = random_genome(Mode::cgp, 1, 1, 5, rng);
    const auto p = params(0, 10);
    EXPECT_THROW(subgraph_addition(g, p, kFeedforward, rng), UnsupportedOperator);
    EXPECT_THROW(subgraph_deletion(g, p, kFeedforward, fset(), rng), UnsupportedOperator);
    EXPECT_THROW(mixed_subgraph_mutate(g, p, kFeedforward, fset(), rng), UnsupportedOperator);
}

TEST(SubgraphAddition, InvertsConnectionPosition) {
    for (double pi : {0.1, 0.35, 0.8}) {
        const double x = connection_gene_for(0.5 * pi, pi, kFeedforward);
        EXPECT_NEAR(x, (0.5 * pi + 0.5) / (pi + 0.5), 1e-15);
        EXPECT_NEAR(connection_position(x, pi, kFeedforward, Mode::pcgp), 0.5 * pi, 1e-15);
    }
    const DecodeSettings s{0.4, -0.8, false};
    Rng rng(45);
    for (int t = 0; t < 1000; ++t) {
        const double src = rng.uniform(), tgt = rng.uniform(-0.8, src);
        EXPECT_NEAR(connection_position(connection_gene_for(tgt, src, s), src, s, Mode::pcgp), tgt, 1e-12);
    }
}

TEST(SubgraphAddition, NewNodesSnapOntoPoolMembers) {
    Rng rng(46);
    for (int t = 0; t < 200; ++t) {
        const DecodeSettings s{t % 2 ? 0.0 : rng.uniform(), rng.uniform(-1.0, -0.1), false};
        const auto g = random_genome(Mode::pcgp, 1 + rng.below(3), 1, rng.below(8), rng);
        const auto p = params(10 + rng.below(20), 100, 0.3);
        const auto child = subgraph_addition(g, p, s, rng);
        ASSERT_EQ(child.n_nodes(), g.n_nodes() + delta_count(p));
        std::multiset<std::tuple<double, double, double, double, double>> old;
        for (const auto& n : g.nodes()) old.insert({n.p, n.x, n.y, n.f, n.c});
        const auto graph = decode(child, s, fset());
        for (std::size_t j = 0; j < child.n_nodes(); ++j) {
            const auto& n = child.nodes()[j];
            auto it = old.find({n.p, n.x, n.y, n.f, n.c});
            if (it != old.end()) {
                old.erase(it);
                continue;
            }
            for (std::size_t k = 0; k < 2; ++k) {
                const double point = connection_position(k ? n.y : n.x, n.p, s, Mode::pcgp);
                EXPECT_NEAR(graph.positions[graph.targets[j][k]], point, 1e-12);
                EXPECT_LT(graph.positions[graph.targets[j][k]], n.p);
            }
        }
        EXPECT_TRUE(old.empty());
    }
}

TEST(SubgraphAddition, TruncatesAtSizeMax) {
    Rng rng(47);
    const auto g = random_genome(Mode::pcgp, 1, 1, 10, rng);
    EXPECT_EQ(subgraph_addition(g, params(10, 11, 0.5), kFeedforward, rng).n_nodes(), 11u);
    EXPECT_EQ(subgraph_addition(g, params(10, 10, 0.5), kFeedforward, rng).n_nodes(), 10u);
}

TEST(SubgraphDeletion, RemovesFromTheOnlyTree) {
    // Chain of five: each node reads its left neighbour (the first reads the input).
    const std::vector<double> pos = {0.1, 0.3, 0.5, 0.7, 0.9};
    std::vector<std::pair<double, double>> links = {{-0.5, -0.5}};
    for (std::size_t j = 1; j < pos.size(); ++j) links.push_back({pos[j - 1], pos[j - 1]});
    const auto g = linked_pcgp(pos, links);
    ASSERT_EQ(decode(g, kFeedforward, fset()).components.size(), 1u);
    Rng rng(48);
    EXPECT_EQ(subgraph_deletion(g, params(3, 10, 0.5), kFeedforward, fset(), rng).n_nodes(), 3u);
}

TEST(SubgraphDeletion, TreeSmallerThanDeltaIsExhausted) {
    // Nodes 0 and 1 form a tree; nodes 2..8 read only the input.
    std::vector<double> pos;
    std::vector<std::pair<double, double>> links;
    for (int j = 0; j < 9; ++j) pos.push_back(0.05 + 0.1 * j);
    links.push_back({-0.5, -0.5});
    links.push_back({pos[0], -0.5});
    for (int j = 2; j < 9; ++j) links.push_back({-0.5, -0.5});
    const auto g = linked_pcgp(pos, links);
    ASSERT_EQ(decode(g, kFeedforward, fset()).components.size(), 8u);
    Rng rng(49);
    const auto child = subgraph_deletion(g, params(6, 20, 0.5), kFeedforward, fset(), rng); // k = 3
    ASSERT_EQ(child.n_nodes(), 7u);
    EXPECT_EQ(child.nodes().front().p, pos[2]);
}

TEST(SubgraphDeletion, SingletonsFallBackToNodeDeletion) {
    std::vector<double> pos = {0.2, 0.4, 0.6, 0.8};
    std::vector<std::pair<double, double>> links(4, {-0.5, -0.5});
    const auto g = linked_pcgp(pos, links);
    Rng a(50), b(50);
    const auto p = params(1, 10, 1.0);
    EXPECT_EQ(subgraph_deletion(g, p, kFeedforward, fset(), a), node_deletion(g, p, b));
}

TEST(Mutate, ChildrenValidAndWithinBounds) {
    Rng rng(51);
    for (auto op : {MutationOp::gene, MutationOp::mixed_node, MutationOp::mixed_subgraph}) {
        auto g = random_genome(Mode::pcgp, 2, 2, 15, rng);
        auto p = params(10, 20, 0.3, 0.4);
        p.op = op;
        p.m_active = true;
        const DecodeSettings s{0.3, -0.6, false};
        for (int t = 0; t < 500; ++t) {
            const auto child = mutate(g, p, s, fset(), rng);
            EXPECT_NO_THROW(validate(child));
            EXPECT_GE(child.n_nodes(), 10u);
            EXPECT_LE(child.n_nodes(), 20u);
            const auto diff = child.n_nodes() > g.n_nodes() ? child.n_nodes() - g.n_nodes() : g.n_nodes() - child.n_nodes();
            EXPECT_LE(diff, delta_count(p));
            if (op == MutationOp::gene) EXPECT_EQ(diff, 0u);
            g = child;
        }
    }
}

TEST(Mutate, SeededIsDeterministic) {
    Rng seed_rng(52);
    const auto g = random_genome(Mode::pcgp, 2, 2, 15, seed_rng);
    for (auto op : {MutationOp::gene, MutationOp::mixed_node, MutationOp::mixed_subgraph}) {
        auto p = params(10, 20, 0.3, 0.4);
        p.op = op;
        Rng a(99), b(99);
        for (int t = 0; t < 20; ++t) EXPECT_EQ(mutate(g, p, kFeedforward, fset(), a), mutate(g, p, kFeedforward, fset(), b));
    }
}

TEST(MutationOp, ParseRoundTrip) {
    for (auto op : {MutationOp::gene, MutationOp::mixed_node, MutationOp::mixed_subgraph})
        EXPECT_EQ(parse_mutation_op(to_string(op)), op);
    EXPECT_THROW(parse_mutation_op("bogus"), ConfigError);
}
