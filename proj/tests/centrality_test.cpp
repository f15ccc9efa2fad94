#include "fixtures.hpp"
#include "oracles.hpp"

#include "mobnet/centrality.hpp"
#include "mobnet/error.hpp"
#include "mobnet/netbuild.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace mobnet;
using namespace mobnet::testing;

namespace {

void expect_close(std::span<const double> got, const Eigen::VectorXd &want, double tol) {
    ASSERT_EQ(got.size(), static_cast<std::size_t>(want.size()));
    for (std::size_t i = 0; i < got.size(); ++i)
        EXPECT_NEAR(got[i], want[static_cast<Eigen::Index>(i)], tol) << "node " << i;
}

} // namespace

TEST(pagerank, matches_dense_solve_with_dangling_nodes) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto g = random_network(12, 0.15, seed % 2 == 0, seed);
        const auto pr = pagerank(g);
        expect_close(pr.scores, pagerank_oracle(g, 0.85), 1e-9);
    }
}

TEST(pagerank, directed_cycle_is_uniform) {
    WeightedNetwork g(3, true);
    g.add(0, 1, 1);
    g.add(1, 2, 1);
    g.add(2, 0, 1);
    for (double v : pagerank(g).scores)
        EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
}

TEST(pagerank, other_damping_values) {
    const auto g = random_network(15, 0.2, true, 8);
    SolverConfig cfg;
    cfg.damping = 0.5;
    expect_close(pagerank(g, cfg).scores, pagerank_oracle(g, 0.5), 1e-9);
}

TEST(pagerank, property_mass_conserved_every_iteration) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = random_network(30, 0.08, true, seed);
        std::size_t calls = 0;
        pagerank(g, {}, [&](std::size_t, std::span<const double> x) {
            ++calls;
            double s = std::accumulate(x.begin(), x.end(), 0.0);
            ASSERT_NEAR(s, 1.0, 1e-9);
            for (double v : x)
                ASSERT_GE(v, 0.0);
        });
        EXPECT_GE(calls, 2u);
    }
}

TEST(pagerank, property_scale_invariance) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = random_network(20, 0.15, seed % 2 == 1, seed);
        const auto a = pagerank(g).scores;
        const auto b = pagerank(g.scaled(37.5)).scores;
        for (std::size_t i = 0; i < a.size(); ++i)
            EXPECT_NEAR(a[i], b[i], 1e-9);
    }
}

TEST(pagerank, non_convergence_reports_state) {
    const auto g = random_network(20, 0.2, true, 3);
    SolverConfig cfg;
    cfg.max_iterations = 2;
    cfg.tolerance = 1e-15;
    try {
        pagerank(g, cfg);
        FAIL() << "expected SolverError";
    } catch (const SolverError &e) {
        EXPECT_EQ(e.iterations(), 2u);
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(pagerank, rejects_bad_settings) {
    WeightedNetwork g(2, true);
    g.add(0, 1, 1);
    SolverConfig cfg;
    cfg.damping = 1.0;
    EXPECT_THROW(pagerank(g, cfg), ConfigError);
    cfg.damping = 0.85;
    cfg.tolerance = 0;
    EXPECT_THROW(pagerank(g, cfg), ConfigError);
    EXPECT_THROW(pagerank(WeightedNetwork(0, true)), ConfigError);
}

TEST(eigenvector, star_closed_form) {
    WeightedNetwork g(5, false);
    for (NodeIndex leaf = 1; leaf < 5; ++leaf)
        g.add(0, leaf, 1);
    const auto ev = eigenvector_centrality(g);
    EXPECT_NEAR(ev.scores[0], 1.0 / std::sqrt(2.0), 1e-9);
    for (NodeIndex leaf = 1; leaf < 5; ++leaf)
        EXPECT_NEAR(ev.scores[leaf], 1.0 / (2.0 * std::sqrt(2.0)), 1e-9);
}

TEST(eigenvector, matches_dense_eigensolver) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        // a connected undirected graph, or a directed graph with a Hamiltonian cycle
        WeightedNetwork g = random_network(15, 0.2, seed % 2 == 0, seed, true);
        if (g.directed())
            g.add(14, 0, 1.0);
        const auto ev = eigenvector_centrality(g);
        expect_close(ev.scores, eigen_oracle(g), 1e-7);
        // residual check independent of the solver's own
        const Eigen::MatrixXd at = dense_adjacency(g).transpose();
        const Eigen::Map<const Eigen::VectorXd> x(ev.scores.data(), 15);
        const double lambda = x.dot(at * x);
        EXPECT_LT((at * x - lambda * x).norm(), 1e-6 * lambda);
    }
}

TEST(eigenvector, acyclic_network_fails) {
    WeightedNetwork g(3, true);
    g.add(0, 1, 1);
    g.add(1, 2, 1);
    EXPECT_THROW(eigenvector_centrality(g), SolverError);
    EXPECT_THROW(eigenvector_centrality(WeightedNetwork(3, true)), SolverError);
}

TEST(current_flow, path_closed_form) {
    WeightedNetwork g(3, false);
    g.add(0, 1, 1);
    g.add(1, 2, 1);
    const auto c = current_flow_closeness(g);
    EXPECT_NEAR(c.scores[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(c.scores[1], 1.0, 1e-12);
    EXPECT_NEAR(c.scores[2], 2.0 / 3.0, 1e-12);
}

TEST(current_flow, triangle_closed_form) {
    WeightedNetwork g(3, false);
    g.add(0, 1, 1);
    g.add(1, 2, 1);
    g.add(0, 2, 1);
    for (double v : current_flow_closeness(g).scores)
        EXPECT_NEAR(v, 1.5, 1e-12);
}

TEST(current_flow, matches_pseudo_inverse) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = random_network(5 + 2 * seed, 0.25, false, seed, true);
        expect_close(current_flow_closeness(g).scores, current_flow_oracle(g), 1e-9);
    }
}

TEST(current_flow, iterative_path_matches_direct_path) {
    const auto g = random_network(60, 0.08, false, 42, true);
    const auto direct = current_flow_closeness(g);
    CurrentFlowOptions cg;
    cg.direct_limit = 0;
    cg.cg_tolerance = 1e-12;
    const auto iterative = current_flow_closeness(g, cg);
    for (std::size_t i = 0; i < 60; ++i)
        EXPECT_NEAR(iterative.scores[i], direct.scores[i], 1e-7 * direct.scores[i]);
}

TEST(current_flow, components_are_scored_separately) {
    WeightedNetwork g(6, false);
    g.add(0, 1, 1);
    g.add(1, 2, 1);
    g.add(3, 4, 2);
    const auto c = current_flow_closeness(g);
    EXPECT_NEAR(c.scores[1], 1.0, 1e-12);
    EXPECT_NEAR(c.scores[3], 2.0, 1e-12); // (2-1) / (1/2)
    EXPECT_EQ(c.scores[5], 0.0);
}

TEST(current_flow, directed_input_rejected) {
    WeightedNetwork g(2, true);
    g.add(0, 1, 1);
    EXPECT_THROW(current_flow_closeness(g), ConfigError);
    EXPECT_THROW(weighted_clustering(g), ConfigError);
    EXPECT_THROW(compute_centrality(Measure::current_flow_closeness, g), ConfigError);
}

TEST(clustering, triangle_and_path) {
    WeightedNetwork tri(3, false);
    tri.add(0, 1, 2);
    tri.add(1, 2, 2);
    tri.add(0, 2, 2);
    for (double v : weighted_clustering(tri).scores)
        EXPECT_NEAR(v, 1.0, 1e-12);
    WeightedNetwork path(3, false);
    path.add(0, 1, 1);
    path.add(1, 2, 1);
    for (double v : weighted_clustering(path).scores)
        EXPECT_EQ(v, 0.0);
}

TEST(clustering, matches_triple_enumeration) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = random_network(14, 0.35, false, seed);
        const auto want = clustering_oracle(g);
        const auto got = weighted_clustering(g).scores;
        for (std::size_t i = 0; i < want.size(); ++i)
            EXPECT_NEAR(got[i], want[i], 1e-12);
    }
}

TEST(measure, names_round_trip) {
    for (auto m : {Measure::pagerank, Measure::eigenvector, Measure::current_flow_closeness,
                   Measure::clustering})
        EXPECT_EQ(parse_measure(to_string(m)), m);
    EXPECT_THROW(parse_measure("betweenness"), ConfigError);
}

TEST(projection, sums_arrival_scores) {
    std::vector<MemoryNode> nodes{{st('A'), st('B')}, {st('B'), st('A')}, {st('C'), st('B')}};
    const MemoryNetwork g(nodes, {{{0, 1}, 1}, {{2, 1}, 1}});
    const ScoreVector ms{Measure::eigenvector, {0.2, 0.3, 0.5}};
    const auto out = project_memory_scores(ms, g, 3);
    EXPECT_DOUBLE_EQ(out.scores[index(st('A'))], 0.3);
    EXPECT_DOUBLE_EQ(out.scores[index(st('B'))], 0.7);
    EXPECT_DOUBLE_EQ(out.scores[index(st('C'))], 0.0);
    EXPECT_THROW(project_memory_scores({Measure::pagerank, {1.0}}, g, 3), ConfigError);
}

// Memory PageRank equals the damped second-order chain solved densely, then projected.
TEST(projection, second_order_chain_oracle) {
    const auto days = random_days(150, 6, 12);
    const auto mem = build_debruijn(days);
    const auto wg = mem.to_weighted();
    const auto want_nodes = pagerank_oracle(wg, 0.85);
    Eigen::VectorXd want = Eigen::VectorXd::Zero(6);
    for (std::size_t k = 0; k < mem.nodes().size(); ++k)
        want[index(mem.nodes()[k].to)] += want_nodes[static_cast<Eigen::Index>(k)];
    want /= want.sum();
    const auto got = project_memory_scores(pagerank(mem), mem, 6);
    expect_close(got.scores, want, 1e-9);
    EXPECT_NEAR(std::accumulate(got.scores.begin(), got.scores.end(), 0.0), 1.0, 1e-12);
}
