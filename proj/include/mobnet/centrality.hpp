#pragma once

#include "mobnet/netbuild.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace mobnet {

enum class Measure { pagerank, eigenvector, current_flow_closeness, clustering };

/// CLI names: pagerank, eigenvector, currentflow, clustering.
Measure parse_measure(std::string_view name);
std::string_view to_string(Measure m);
/// Current-flow closeness and clustering are defined only on undirected networks.
bool requires_undirected(Measure m);

struct SolverConfig {
    double damping = 0.85;
    double tolerance = 1e-10; // L1 change between successive iterates
    std::size_t max_iterations = 1000;

    /// Throws ConfigError unless damping in (0,1), tolerance > 0, max_iterations > 0.
    void validate() const;
};

struct ScoreVector {
    Measure measure;
    std::vector<double> scores; // indexed by node
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Called after each PageRank iteration with the current iterate.
using IterationObserver = std::function<void(std::size_t iteration, std::span<const double>)>;

/// Weighted PageRank by power iteration. Undirected edges count in both directions;
/// dangling nodes spread their mass uniformly. Throws SolverError on non-convergence.
ScoreVector pagerank(const WeightedNetwork &g, const SolverConfig &cfg = {},
                     const IterationObserver &observer = {});
ScoreVector pagerank(const MemoryNetwork &g, const SolverConfig &cfg = {});

/// Principal eigenvector with in-edge aggregation, x_i ~ sum_j w_ji x_j, unit L2 norm.
ScoreVector eigenvector_centrality(const WeightedNetwork &g, const SolverConfig &cfg = {});
ScoreVector eigenvector_centrality(const MemoryNetwork &g, const SolverConfig &cfg = {});

struct CurrentFlowOptions {
    /// Components up to this size use a dense Cholesky factorization, larger ones CG.
    std::size_t direct_limit = 2000;
    double cg_tolerance = 1e-10;
};

/// c_i = (n_c - 1) / sum_{j != i} R_eff(i, j) within i's component; 0 for isolated nodes.
ScoreVector current_flow_closeness(const WeightedNetwork &g, const CurrentFlowOptions &opts = {});

/// Onnela-style weighted clustering with the global maximum weight; 0 when degree < 2.
ScoreVector weighted_clustering(const WeightedNetwork &g);

/// Dispatch on `m`. Throws ConfigError for directed input to undirected-only measures.
ScoreVector compute_centrality(Measure m, const WeightedNetwork &g, const SolverConfig &cfg = {});

/// Station score(k) = sum of memory-node scores ij with j = k. PageRank scores are
/// renormalized to sum to one.
ScoreVector project_memory_scores(const ScoreVector &memory_scores, const MemoryNetwork &g,
                                  std::size_t station_count);

} // namespace mobnet
