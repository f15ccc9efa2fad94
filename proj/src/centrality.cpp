#include "mobnet/centrality.hpp"

#include "mobnet/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mobnet {

namespace {

struct InEdge {
    NodeIndex source;
    double weight;
};

/// In-adjacency with undirected edges expanded to both directions.
std::vector<std::vector<InEdge>> in_adjacency(const WeightedNetwork &g) {
    std::vector<std::vector<InEdge>> in(g.node_count());
    for (const auto &[key, w] : g.edges()) {
        in[key.second].push_back({key.first, w});
        if (!g.directed())
            in[key.first].push_back({key.second, w});
    }
    return in;
}

std::vector<double> out_strength(const WeightedNetwork &g) {
    std::vector<double> out(g.node_count(), 0.0);
    for (const auto &[key, w] : g.edges()) {
        out[key.first] += w;
        if (!g.directed())
            out[key.second] += w;
    }
    return out;
}

void require_nonempty(const WeightedNetwork &g, std::string_view what) {
    if (g.node_count() == 0)
        throw ConfigError(std::string(what) + ": network has no nodes");
}

void require_undirected(const WeightedNetwork &g, std::string_view what) {
    if (g.directed())
        throw ConfigError(std::string(what) + " requires an undirected network");
}

/// Connected components of an undirected network, each sorted ascending.
std::vector<std::vector<NodeIndex>> components(const WeightedNetwork &g) {
    std::vector<NodeIndex> parent(g.node_count());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](NodeIndex x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto &[key, w] : g.edges()) {
        auto a = find(key.first), b = find(key.second);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::vector<NodeIndex>> groups(g.node_count());
    for (NodeIndex v = 0; v < g.node_count(); ++v)
        groups[find(v)].push_back(v);
    std::erase_if(groups, [](const auto &c) { return c.empty(); });
    return groups;
}

} // namespace

Measure parse_measure(std::string_view name) {
    if (name == "pagerank")
        return Measure::pagerank;
    if (name == "eigenvector")
        return Measure::eigenvector;
    if (name == "currentflow")
        return Measure::current_flow_closeness;
    if (name == "clustering")
        return Measure::clustering;
    throw ConfigError("unknown measure '" + std::string(name) + "'");
}

std::string_view to_string(Measure m) {
    switch (m) {
    case Measure::pagerank: return "pagerank";
    case Measure::eigenvector: return "eigenvector";
    case Measure::current_flow_closeness: return "currentflow";
    case Measure::clustering: return "clustering";
    }
    return "unknown";
}

bool requires_undirected(Measure m) {
    return m == Measure::current_flow_closeness || m == Measure::clustering;
}

void SolverConfig::validate() const {
    if (!(damping > 0.0 && damping < 1.0))
        throw ConfigError("damping must lie in (0, 1)");
    if (!(tolerance > 0.0))
        throw ConfigError("tolerance must be positive");
    if (max_iterations == 0)
        throw ConfigError("max_iterations must be positive");
}

// ---------------------------------------------------------------------------
// PageRank

ScoreVector pagerank(const WeightedNetwork &g, const SolverConfig &cfg,
                     const IterationObserver &observer) {
    cfg.validate();
    require_nonempty(g, "pagerank");
    const std::size_t n = g.node_count();
    const double inv_n = 1.0 / static_cast<double>(n);
    const auto in = in_adjacency(g);
    const auto strength = out_strength(g);

    std::vector<double> x(n, inv_n), next(n);
    if (observer)
        observer(0, x);
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        double dangling = 0.0;
        for (std::size_t v = 0; v < n; ++v)
            if (strength[v] == 0.0)
                dangling += x[v];
        const double base = cfg.damping * dangling * inv_n + (1.0 - cfg.damping) * inv_n;
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (const auto &e : in[i])
                sum += e.weight / strength[e.source] * x[e.source];
            next[i] = cfg.damping * sum + base;
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            change += std::abs(next[i] - x[i]);
        x.swap(next);
        if (observer)
            observer(it, x);
        if (change < cfg.tolerance)
            return {Measure::pagerank, std::move(x), it, change};
        if (it == cfg.max_iterations)
            throw SolverError("pagerank did not converge", it, change);
    }
    throw SolverError("pagerank did not converge", cfg.max_iterations, 0.0);
}

ScoreVector pagerank(const MemoryNetwork &g, const SolverConfig &cfg) {
    return pagerank(g.to_weighted(), cfg);
}

// ---------------------------------------------------------------------------
// Eigenvector centrality

ScoreVector eigenvector_centrality(const WeightedNetwork &g, const SolverConfig &cfg) {
    cfg.validate();
    require_nonempty(g, "eigenvector_centrality");
    const std::size_t n = g.node_count();
    auto in = in_adjacency(g);

    // Rescale so the largest in-strength is 1; the spectrum then lies in the unit disk
    // and the +I shift below breaks the periodicity of bipartite/cyclic structure.
    double max_in = 0.0;
    for (const auto &edges : in) {
        double s = 0.0;
        for (const auto &e : edges)
            s += e.weight;
        max_in = std::max(max_in, s);
    }
    if (max_in == 0.0)
        throw SolverError("eigenvector_centrality: network has no edges", 0, 0.0);
    for (auto &edges : in)
        for (auto &e : edges)
            e.weight /= max_in;

    auto multiply = [&](const std::vector<double> &x, std::vector<double> &y) {
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (const auto &e : in[i])
                sum += e.weight * x[e.source];
            y[i] = sum;
        }
    };
    auto normalize = [](std::vector<double> &x) {
        double norm = 0.0;
        for (double v : x)
            norm += v * v;
        norm = std::sqrt(norm);
        for (double &v : x)
            v /= norm;
        return norm;
    };

    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), ax(n), next(n);
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        multiply(x, ax);
        for (std::size_t i = 0; i < n; ++i)
            next[i] = ax[i] + x[i];
        normalize(next);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            change += std::abs(next[i] - x[i]);
        x.swap(next);
        if (change < cfg.tolerance) {
            multiply(x, ax);
            double lambda = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                lambda += x[i] * ax[i];
            double residual = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                residual += (ax[i] - lambda * x[i]) * (ax[i] - lambda * x[i]);
            residual = std::sqrt(residual);
            // relative to the rescaled matrix, whose spectral radius is at most 1
            if (lambda <= 1e-12)
                throw SolverError("eigenvector_centrality: spectral radius is zero "
                                  "(acyclic network)",
                                  it, residual);
            if (residual > 1e-8 * lambda)
                throw SolverError("eigenvector_centrality: converged iterate is not an "
                                  "eigenvector",
                                  it, residual);
            return {Measure::eigenvector, std::move(x), it, residual};
        }
        if (it == cfg.max_iterations)
            throw SolverError("eigenvector_centrality did not converge", it, change);
    }
    throw SolverError("eigenvector_centrality did not converge", cfg.max_iterations, 0.0);
}

ScoreVector eigenvector_centrality(const MemoryNetwork &g, const SolverConfig &cfg) {
    return eigenvector_centrality(g.to_weighted(), cfg);
}

// ---------------------------------------------------------------------------
// Current-flow closeness

ScoreVector current_flow_closeness(const WeightedNetwork &g, const CurrentFlowOptions &opts) {
    require_nonempty(g, "current_flow_closeness");
    require_undirected(g, "current_flow_closeness");
    ScoreVector result{Measure::current_flow_closeness, std::vector<double>(g.node_count(), 0.0)};

    std::vector<std::size_t> local(g.node_count());
    for (const auto &comp : components(g)) {
        const std::size_t m = comp.size();
        if (m < 2)
            continue;
        for (std::size_t a = 0; a < m; ++a)
            local[comp[a]] = a;

        // Grounded Laplacian: drop comp[0]. Row a-1 corresponds to comp[a].
        const std::size_t r = m - 1;
        std::vector<Eigen::Triplet<double>> triplets;
        Eigen::VectorXd degree = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
        for (const auto &[key, w] : g.edges()) {
            if (local[key.first] >= m || comp[local[key.first]] != key.first)
                continue;
            const auto a = static_cast<Eigen::Index>(local[key.first]);
            const auto b = static_cast<Eigen::Index>(local[key.second]);
            degree[a] += w;
            degree[b] += w;
            if (a > 0 && b > 0) {
                triplets.emplace_back(a - 1, b - 1, -w);
                triplets.emplace_back(b - 1, a - 1, -w);
            }
        }
        for (std::size_t a = 1; a < m; ++a)
            triplets.emplace_back(static_cast<Eigen::Index>(a - 1), static_cast<Eigen::Index>(a - 1),
                                  degree[static_cast<Eigen::Index>(a)]);

        const auto rr = static_cast<Eigen::Index>(r);
        Eigen::VectorXd diag(rr), rowsum(rr);
        if (m <= opts.direct_limit) {
            Eigen::SparseMatrix<double> sparse(rr, rr);
            sparse.setFromTriplets(triplets.begin(), triplets.end());
            const Eigen::MatrixXd lap = Eigen::MatrixXd(sparse);
            Eigen::LLT<Eigen::MatrixXd> llt(lap);
            if (llt.info() != Eigen::Success)
                throw SolverError("current_flow_closeness: Laplacian factorization failed", 0, 0.0);
            const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(rr, rr));
            diag = inv.diagonal();
            rowsum = inv.rowwise().sum();
        } else {
            Eigen::SparseMatrix<double> sparse(rr, rr);
            sparse.setFromTriplets(triplets.begin(), triplets.end());
            Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
            cg.setTolerance(opts.cg_tolerance);
            cg.setMaxIterations(static_cast<Eigen::Index>(10 * r + 100));
            cg.compute(sparse);
            auto solve = [&](const Eigen::VectorXd &rhs) {
                Eigen::VectorXd x = cg.solve(rhs);
                if (cg.info() != Eigen::Success)
                    throw SolverError("current_flow_closeness: CG did not converge",
                                      static_cast<std::size_t>(cg.iterations()), cg.error());
                return x;
            };
            rowsum = solve(Eigen::VectorXd::Ones(rr));
            for (Eigen::Index k = 0; k < rr; ++k)
                diag[k] = solve(Eigen::VectorXd::Unit(rr, k))[k];
        }

        // sum_j R(i,j) = m G_ii + tr(G) - 2 sum_j G_ij, with G zero on the ground node
        const double trace = diag.sum();
        const double md = static_cast<double>(m);
        for (std::size_t a = 0; a < m; ++a) {
            const double gii = a == 0 ? 0.0 : diag[static_cast<Eigen::Index>(a - 1)];
            const double gsum = a == 0 ? 0.0 : rowsum[static_cast<Eigen::Index>(a - 1)];
            const double total = md * gii + trace - 2.0 * gsum;
            result.scores[comp[a]] = (md - 1.0) / total;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Weighted clustering

ScoreVector weighted_clustering(const WeightedNetwork &g) {
    require_nonempty(g, "weighted_clustering");
    require_undirected(g, "weighted_clustering");
    const std::size_t n = g.node_count();
    ScoreVector result{Measure::clustering, std::vector<double>(n, 0.0)};
    if (g.edges().empty())
        return result;

    double max_w = 0.0;
    std::vector<std::vector<std::pair<NodeIndex, double>>> adj(n);
    for (const auto &[key, w] : g.edges()) {
        adj[key.first].emplace_back(key.second, w);
        adj[key.second].emplace_back(key.first, w);
        max_w = std::max(max_w, w);
    }
    for (auto &a : adj)
        std::sort(a.begin(), a.end());

    for (std::size_t i = 0; i < n; ++i) {
        const auto &nb = adj[i];
        const double k = static_cast<double>(nb.size());
        if (nb.size() < 2)
            continue;
        double sum = 0.0;
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                const double wjk = g.weight(nb[a].first, nb[b].first);
                if (wjk > 0.0)
                    sum += 2.0 * std::cbrt(nb[a].second * nb[b].second * wjk);
            }
        result.scores[i] = sum / (k * (k - 1.0) * max_w);
    }
    return result;
}

ScoreVector compute_centrality(Measure m, const WeightedNetwork &g, const SolverConfig &cfg) {
    switch (m) {
    case Measure::pagerank: return pagerank(g, cfg);
    case Measure::eigenvector: return eigenvector_centrality(g, cfg);
    case Measure::current_flow_closeness: return current_flow_closeness(g);
    case Measure::clustering: return weighted_clustering(g);
    }
    throw ConfigError("unknown measure");
}

ScoreVector project_memory_scores(const ScoreVector &memory_scores, const MemoryNetwork &g,
                                  std::size_t station_count) {
    const auto &nodes = g.nodes();
    if (memory_scores.scores.size() != nodes.size())
        throw ConfigError("project_memory_scores: score vector does not match memory network");
    ScoreVector out{memory_scores.measure, std::vector<double>(station_count, 0.0),
                    memory_scores.iterations, memory_scores.residual};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (index(nodes[k].to) >= station_count)
            throw DataError("project_memory_scores: station outside the universe");
        out.scores[index(nodes[k].to)] += memory_scores.scores[k];
    }
    if (memory_scores.measure == Measure::pagerank) {
        const double total = std::accumulate(out.scores.begin(), out.scores.end(), 0.0);
        if (total > 0.0)
            for (double &v : out.scores)
                v /= total;
    }
    return out;
}

} // namespace mobnet
