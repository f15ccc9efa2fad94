#pragma once

#include "mobnet/ingest.hpp"
#include "mobnet/motif.hpp"

#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mobnet {

using NodeIndex = std::uint32_t;
using EdgeKey = std::pair<NodeIndex, NodeIndex>;

/// Station-level aggregate graph. Absent pairs have zero weight; stored weights are > 0.
/// Undirected weights live under (min, max).
class WeightedNetwork {
public:
    WeightedNetwork(std::size_t node_count, bool directed)
        : node_count_(node_count), directed_(directed) {}

    bool directed() const noexcept { return directed_; }
    std::size_t node_count() const noexcept { return node_count_; }

    /// Adds `w` to the (i, j) weight. Rejects self-loops and non-positive weights.
    void add(NodeIndex i, NodeIndex j, double w);
    double weight(NodeIndex i, NodeIndex j) const;

    const std::map<EdgeKey, double> &edges() const noexcept { return weights_; }
    double total_weight() const;

    /// Same graph with every weight multiplied by `factor` (> 0).
    WeightedNetwork scaled(double factor) const;

    bool operator==(const WeightedNetwork &) const = default;

private:
    std::size_t node_count_;
    bool directed_;
    std::map<EdgeKey, double> weights_;
};

/// A trip i->j viewed as a node of the second-order network.
struct MemoryNode {
    StationId from;
    StationId to;

    auto operator<=>(const MemoryNode &) const = default;
};

/// Second-order (de Bruijn) network: nodes are trips ij, edges link ij -> jk.
class MemoryNetwork {
public:
    MemoryNetwork() = default;
    MemoryNetwork(std::vector<MemoryNode> nodes, std::map<EdgeKey, std::uint64_t> edges);

    /// Sorted, unique. Edge endpoints index into this list.
    const std::vector<MemoryNode> &nodes() const noexcept { return nodes_; }
    const std::map<EdgeKey, std::uint64_t> &edges() const noexcept { return edges_; }
    std::uint64_t total_weight() const;

    /// Directed WeightedNetwork over memory-node indices.
    WeightedNetwork to_weighted() const;

private:
    std::vector<MemoryNode> nodes_;
    std::map<EdgeKey, std::uint64_t> edges_;
};

/// Exact non-negative fraction.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational &o) const { return num * o.den == o.num * den; }
};

enum class MotifWeighting { unit, normalized };

enum class ReorganizationVariant { complete_graph, motif_wise_unit, motif_wise_normalized };

struct ReorganizedEdge {
    StationId from;
    StationId to;
    Rational weight;
};

/// Per-motif contribution to an aggregate network.
struct ReorganizedMotif {
    ReorganizationVariant variant;
    std::vector<ReorganizedEdge> edges;
};

/// Unit undirected edge between every pair of visited stations (from < to).
ReorganizedMotif reorganize_complete_graph(const DailyMotif &m);

/// Edges from the initial station to every other visited station i with s(i) > 0,
/// weighted s(i) or s(i) / sum_{j != initial} s(j).
ReorganizedMotif reorganize_motif_wise(const DailyMotif &m, MotifWeighting weighting);

WeightedNetwork build_classic(std::span<const DailyMotif> motifs, std::size_t station_count);
WeightedNetwork symmetrize(const WeightedNetwork &g);
WeightedNetwork build_motif_based(std::span<const DailyMotif> motifs, std::size_t station_count);
WeightedNetwork build_motif_wise(std::span<const DailyMotif> motifs, std::size_t station_count,
                                 MotifWeighting weighting);
MemoryNetwork build_debruijn(std::span<const PassengerDay> days);

enum class Strategy {
    classic,
    classic_undirected,
    motif_based,
    motif_wise_unit,
    motif_wise_normalized,
    debruijn,
};

/// Accepts the CLI names: classic, classic-undirected, motif-based, motif-wise
/// (unit weighting), motif-wise-normalized, debruijn.
Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy s);
bool is_directed(Strategy s);

using Network = std::variant<WeightedNetwork, MemoryNetwork>;

Network build_network(Strategy strategy, std::span<const PassengerDay> days,
                      std::span<const DailyMotif> motifs, std::size_t station_count);

/// `src,dst,weight`
void write_edge_list(std::ostream &out, const WeightedNetwork &g, const StationUniverse &universe);
/// `src_i,src_j,dst_j,dst_k,weight`
void write_edge_list(std::ostream &out, const MemoryNetwork &g, const StationUniverse &universe);

} // namespace mobnet
