#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pcgp/execute.hpp"

using namespace pcgp;

namespace {

const FunctionSet& fset() {
    static const FunctionSet f = FunctionSet::standard();
    return f;
}

constexpr double kAddGene = 0.0;   // index 0 of 8
constexpr double kMultGene = 0.3;  // index 2
constexpr double kPdivGene = 0.4;  // index 3
constexpr double kConstGene = 1.0; // index 7

std::vector<double> random_inputs(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

std::vector<double> run(const Genome& g, const DecodeSettings& s, const std::vector<double>& in) {
    Program p(g, s, fset());
    const auto out = p.step(in);
    return {out.begin(), out.end()};
}

} // namespace

TEST(Primitives, Semantics) {
    const auto& f = fset();
    EXPECT_EQ(f.size(), 8u);
    EXPECT_EQ(f[0].fn(2, 3, 0), 5);
    EXPECT_EQ(f[1].fn(2, 3, 0), -1);
    EXPECT_EQ(f[2].fn(2, 3, 0), 6);
    EXPECT_EQ(f[3].fn(3, 2, 0), 1.5);
    EXPECT_EQ(f[3].fn(3, 1e-7, 0), 3);
    EXPECT_EQ(f[3].fn(3, -1e-7, 0), 3);
    EXPECT_DOUBLE_EQ(f[4].fn(0.5, 9, 0), std::sin(0.5));
    EXPECT_DOUBLE_EQ(f[5].fn(0.5, 9, 0), std::cos(0.5));
    EXPECT_EQ(f[6].fn(-4, 9, 0), 4);
    EXPECT_EQ(f[7].fn(9, 9, 0.75), 0.5);
    EXPECT_EQ(f[7].arity, 0);
}

TEST(FunctionSet, RejectsBadSets) {
    EXPECT_THROW(FunctionSet(std::vector<Function>{}), ConfigError);
    EXPECT_THROW(FunctionSet::from_names({"add", "add"}), ConfigError);
    EXPECT_THROW(FunctionSet::from_names({"nope"}), ConfigError);
}

TEST(Step, WeightedMult) {
    // in0 .25, n0 .75; both connections reach in0.
    const Genome g(Mode::cgp, 1, 1, {NodeGenes{0, 0.0, 0.0, kMultGene, 0.5}}, {1.0});
    const auto out = run(g, DecodeSettings{0.0, -0.5, true}, {0.8});
    EXPECT_NEAR(out[0], 0.32, 1e-15);
}

TEST(Step, SelfLoopAccumulator) {
    const Genome g(Mode::cgp, 1, 1, {NodeGenes{0, 0.0, 0.75, kAddGene, 0.5}}, {0.75});
    Program p(g, DecodeSettings{1.0, -0.5, false}, fset());
    const std::vector<double> one = {1.0};
    EXPECT_EQ(p.step(one)[0], 1.0);
    EXPECT_EQ(p.step(one)[0], 2.0);
    EXPECT_EQ(p.step(one)[0], 3.0);
    p.reset();
    EXPECT_EQ(p.state().node_values[0], 0.0);
    EXPECT_EQ(p.step(one)[0], 1.0);
}

TEST(Step, LaterNodeReadsPreviousStep) {
    // Ladder in0 .125, n0 .375, n1 .625, n2 .875 at r=1 (point = x).
    // n0 = add(in0, n1) reads n1 from the previous step; n1 = add(in0, n0) reads this step's n0.
    const Genome g(Mode::cgp, 1, 2,
                   {NodeGenes{0, 0.125, 0.625, kAddGene, 0.5}, NodeGenes{0, 0.125, 0.375, kAddGene, 0.5},
                    NodeGenes{0, 0.125, 0.125, kAddGene, 0.5}},
                   {0.375, 0.625});
    Program p(g, DecodeSettings{1.0, -0.5, false}, fset());
    ASSERT_TRUE(p.graph().recurrent[0][1]);
    ASSERT_FALSE(p.graph().recurrent[1][1]);
    // Hand simulation with x=1: step1 n0=1, n1=2; step2 n0=1+2=3, n1=1+3=4; step3 n0=5, n1=6.
    const std::vector<double> one = {1.0};
    const double expect[3][2] = {{1, 2}, {3, 4}, {5, 6}};
    for (const auto& e : expect) {
        const auto out = p.step(one);
        EXPECT_EQ(out[0], e[0]);
        EXPECT_EQ(out[1], e[1]);
    }
}

TEST(Step, InputLengthMismatch) {
    const Genome g(Mode::cgp, 2, 1, {}, {0.0});
    Program p(g, {}, fset());
    const std::vector<double> one = {1.0};
    EXPECT_THROW(p.step(one), Error);
}

TEST(Step, OutputOnInputPassesThrough) {
    const Genome g(Mode::cgp, 2, 1, {}, {1.0});
    EXPECT_EQ(run(g, {}, {3.0, 4.0})[0], 4.0);
}

TEST(Step, NonFiniteBecomesZero) {
    // pdiv(in0, in1) with in0 = inf gives inf, replaced by 0.
    const Genome g(Mode::cgp, 2, 1, {NodeGenes{0, 0.0, 1.0, kPdivGene, 0.5}}, {1.0});
    const auto out = run(g, {}, {std::numeric_limits<double>::infinity(), 2.0});
    EXPECT_EQ(out[0], 0.0);
}

TEST(Step, ConstUsesParameterGene) {
    const Genome g(Mode::cgp, 1, 1, {NodeGenes{0, 0.0, 0.0, kConstGene, 0.25}}, {1.0});
    EXPECT_EQ(run(g, {}, {7.0})[0], -0.5);
}

TEST(Step, StatelessAtZeroRecurrency) {
    Rng rng(21);
    for (int t = 0; t < 100; ++t) {
        const Mode m = t % 2 ? Mode::pcgp : Mode::cgp;
        const auto g = random_genome(m, 1 + rng.below(4), 1 + rng.below(3), rng.below(40), rng);
        const DecodeSettings s{0.0, -0.5, t % 4 < 2};
        Program p(g, s, fset());
        const auto in = random_inputs(g.n_in(), rng);
        const auto span = p.step(in);
        const std::vector<double> first(span.begin(), span.end());
        const auto again = p.step(in);
        for (std::size_t o = 0; o < first.size(); ++o) EXPECT_EQ(first[o], again[o]);
        Program fresh(g, s, fset());
        const auto f = fresh.step(in);
        for (std::size_t o = 0; o < first.size(); ++o) EXPECT_EQ(first[o], f[o]);
    }
}

TEST(Step, ParameterGenesIgnoredWithoutWeights) {
    Rng rng(22);
    const auto no_const = FunctionSet::from_names({"add", "sub", "mult", "pdiv", "sin", "cos", "abs"});
    for (int t = 0; t < 100; ++t) {
        const auto g = random_genome(Mode::pcgp, 2, 2, 1 + rng.below(30), rng);
        auto nodes = g.nodes();
        for (auto& n : nodes) n.c = rng.uniform();
        const Genome h(g.mode(), g.n_in(), g.n_out(), nodes, g.outputs(), g.input_positions());
        const DecodeSettings s{rng.uniform(), -0.5, false};
        Program a(g, s, no_const), b(h, s, no_const);
        for (int k = 0; k < 3; ++k) {
            const auto in = random_inputs(2, rng);
            const auto oa = a.step(in);
            const auto ob = b.step(in);
            for (std::size_t o = 0; o < 2; ++o) EXPECT_EQ(oa[o], ob[o]);
        }
    }
}

TEST(Step, JunkNodesDoNotInterfere) {
    Rng rng(23);
    for (int t = 0; t < 200; ++t) {
        const Mode m = t % 2 ? Mode::pcgp : Mode::cgp;
        const auto g = random_genome(m, 1 + rng.below(3), 1 + rng.below(3), rng.below(40), rng);
        const DecodeSettings s{t % 3 == 0 ? 0.0 : rng.uniform(), -0.5, t % 5 == 0};
        const auto graph = decode(g, s, fset());
        ProgramState all(graph.n_nodes()), active_only(graph.n_nodes());
        std::vector<double> out_all(g.n_out()), out_active(g.n_out());
        for (int k = 0; k < 4; ++k) {
            const auto in = random_inputs(g.n_in(), rng);
            step(graph, g, fset(), s, all, in, out_all, false);
            step(graph, g, fset(), s, active_only, in, out_active, true);
            for (std::size_t o = 0; o < g.n_out(); ++o) EXPECT_EQ(out_all[o], out_active[o]);
        }
    }
}

TEST(Step, OutputsFiniteForFiniteInputs) {
    Rng rng(24);
    for (int t = 0; t < 200; ++t) {
        const auto g = random_genome(Mode::pcgp, 2, 2, rng.below(50), rng);
        Program p(g, DecodeSettings{rng.uniform(), -0.5, true}, fset());
        for (int k = 0; k < 20; ++k) {
            const std::vector<double> in = {rng.uniform(-1e6, 1e6), rng.uniform(-1e-9, 1e-9)};
            for (double v : p.step(in)) EXPECT_TRUE(std::isfinite(v));
        }
    }
}

TEST(ProgramState, ResetIsIdempotent) {
    ProgramState s(3);
    s.node_values = {1, 2, 3};
    s.reset();
    const auto once = s.node_values;
    s.reset();
    EXPECT_EQ(s.node_values, once);
    EXPECT_EQ(once, (std::vector<double>{0, 0, 0}));
}
