#include "mobnet/netbuild.hpp"

#include "mobnet/csv.hpp"
#include "mobnet/error.hpp"

#include <algorithm>
#include <set>

namespace mobnet {

// ---------------------------------------------------------------------------
// WeightedNetwork

void WeightedNetwork::add(NodeIndex i, NodeIndex j, double w) {
    if (i == j)
        throw DataError("WeightedNetwork: self-loop on node " + std::to_string(i));
    if (i >= node_count_ || j >= node_count_)
        throw DataError("WeightedNetwork: node index out of range");
    if (!(w > 0.0))
        throw DataError("WeightedNetwork: edge weights must be positive");
    if (!directed_ && j < i)
        std::swap(i, j);
    weights_[{i, j}] += w;
}

double WeightedNetwork::weight(NodeIndex i, NodeIndex j) const {
    if (!directed_ && j < i)
        std::swap(i, j);
    auto it = weights_.find({i, j});
    return it == weights_.end() ? 0.0 : it->second;
}

double WeightedNetwork::total_weight() const {
    double total = 0.0;
    for (const auto &[key, w] : weights_)
        total += w;
    return total;
}

WeightedNetwork WeightedNetwork::scaled(double factor) const {
    if (!(factor > 0.0))
        throw ConfigError("WeightedNetwork::scaled: factor must be positive");
    WeightedNetwork out(node_count_, directed_);
    for (const auto &[key, w] : weights_)
        out.weights_.emplace(key, w * factor);
    return out;
}

// ---------------------------------------------------------------------------
// MemoryNetwork

MemoryNetwork::MemoryNetwork(std::vector<MemoryNode> nodes, std::map<EdgeKey, std::uint64_t> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    if (!std::is_sorted(nodes_.begin(), nodes_.end()) ||
        std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
        throw DataError("MemoryNetwork: nodes must be sorted and unique");
    for (const auto &[key, w] : edges_) {
        if (key.first >= nodes_.size() || key.second >= nodes_.size() || w == 0)
            throw DataError("MemoryNetwork: edge out of range or zero weight");
        if (nodes_[key.first].to != nodes_[key.second].from)
            throw DataError("MemoryNetwork: edge does not connect ij -> jk");
    }
}

std::uint64_t MemoryNetwork::total_weight() const {
    std::uint64_t total = 0;
    for (const auto &[key, w] : edges_)
        total += w;
    return total;
}

WeightedNetwork MemoryNetwork::to_weighted() const {
    WeightedNetwork g(nodes_.size(), true);
    for (const auto &[key, w] : edges_)
        g.add(key.first, key.second, static_cast<double>(w));
    return g;
}

// ---------------------------------------------------------------------------
// Reorganization

ReorganizedMotif reorganize_complete_graph(const DailyMotif &m) {
    ReorganizedMotif out{ReorganizationVariant::complete_graph, {}};
    for (std::size_t a = 0; a < m.nodes.size(); ++a)
        for (std::size_t b = a + 1; b < m.nodes.size(); ++b)
            out.edges.push_back({m.nodes[a], m.nodes[b], {1, 1}});
    return out;
}

ReorganizedMotif reorganize_motif_wise(const DailyMotif &m, MotifWeighting weighting) {
    std::map<StationId, std::int64_t> in_strength;
    for (const auto &[pair, count] : m.edges)
        if (pair.second != m.initial)
            in_strength[pair.second] += count;

    std::int64_t total = 0;
    for (const auto &[s, v] : in_strength)
        total += v;

    ReorganizedMotif out{weighting == MotifWeighting::unit
                             ? ReorganizationVariant::motif_wise_unit
                             : ReorganizationVariant::motif_wise_normalized,
                         {}};
    if (total == 0)
        return out; // every trip returns to the initial station
    for (const auto &[s, v] : in_strength) {
        if (v == 0)
            continue;
        const std::int64_t den = weighting == MotifWeighting::unit ? 1 : total;
        const std::int64_t g = std::gcd(v, den);
        out.edges.push_back({m.initial, s, {v / g, den / g}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Builders

namespace {

void check_station(StationId s, std::size_t station_count) {
    if (index(s) >= station_count)
        throw DataError("motif references station outside the universe");
}

} // namespace

WeightedNetwork build_classic(std::span<const DailyMotif> motifs, std::size_t station_count) {
    std::map<EdgeKey, std::uint64_t> counts;
    for (const auto &m : motifs)
        for (const auto &[pair, count] : m.edges) {
            check_station(pair.first, station_count);
            check_station(pair.second, station_count);
            counts[{index(pair.first), index(pair.second)}] += count;
        }
    WeightedNetwork g(station_count, true);
    for (const auto &[key, count] : counts)
        g.add(key.first, key.second, static_cast<double>(count));
    return g;
}

WeightedNetwork symmetrize(const WeightedNetwork &g) {
    if (!g.directed())
        throw ConfigError("symmetrize: input network must be directed");
    WeightedNetwork out(g.node_count(), false);
    for (const auto &[key, w] : g.edges())
        out.add(key.first, key.second, w);
    return out;
}

WeightedNetwork build_motif_based(std::span<const DailyMotif> motifs, std::size_t station_count) {
    std::map<EdgeKey, std::uint64_t> counts;
    for (const auto &m : motifs)
        for (const auto &e : reorganize_complete_graph(m).edges) {
            check_station(e.to, station_count);
            ++counts[{index(e.from), index(e.to)}];
        }
    WeightedNetwork g(station_count, false);
    for (const auto &[key, count] : counts)
        g.add(key.first, key.second, static_cast<double>(count));
    return g;
}

WeightedNetwork build_motif_wise(std::span<const DailyMotif> motifs, std::size_t station_count,
                                 MotifWeighting weighting) {
    // Exact accumulation: per edge, integer numerator sums grouped by denominator.
    std::map<EdgeKey, std::map<std::int64_t, std::int64_t>> sums;
    for (const auto &m : motifs)
        for (const auto &e : reorganize_motif_wise(m, weighting).edges) {
            check_station(e.from, station_count);
            check_station(e.to, station_count);
            sums[{index(e.from), index(e.to)}][e.weight.den] += e.weight.num;
        }
    WeightedNetwork g(station_count, true);
    for (const auto &[key, by_den] : sums) {
        double w = 0.0;
        for (const auto &[den, num] : by_den)
            w += static_cast<double>(num) / static_cast<double>(den);
        g.add(key.first, key.second, w);
    }
    return g;
}

MemoryNetwork build_debruijn(std::span<const PassengerDay> days) {
    std::set<MemoryNode> node_set;
    std::map<std::pair<MemoryNode, MemoryNode>, std::uint64_t> links;
    for (const auto &day : days) {
        if (day.trips.size() < 2)
            continue; // single-trip days carry no second-order information
        for (const auto &t : day.trips)
            node_set.insert({t.origin, t.destination});
        for (std::size_t k = 1; k < day.trips.size(); ++k) {
            const auto &prev = day.trips[k - 1];
            const auto &next = day.trips[k];
            if (prev.destination == next.origin)
                ++links[{{prev.origin, prev.destination}, {next.origin, next.destination}}];
        }
    }
    std::vector<MemoryNode> nodes(node_set.begin(), node_set.end());
    auto pos = [&](const MemoryNode &n) {
        return static_cast<NodeIndex>(std::lower_bound(nodes.begin(), nodes.end(), n) -
                                      nodes.begin());
    };
    std::map<EdgeKey, std::uint64_t> edges;
    for (const auto &[link, w] : links)
        edges.emplace(EdgeKey{pos(link.first), pos(link.second)}, w);
    return MemoryNetwork(std::move(nodes), std::move(edges));
}

// ---------------------------------------------------------------------------
// Strategy dispatch and output

Strategy parse_strategy(std::string_view name) {
    if (name == "classic")
        return Strategy::classic;
    if (name == "classic-undirected")
        return Strategy::classic_undirected;
    if (name == "motif-based")
        return Strategy::motif_based;
    if (name == "motif-wise" || name == "motif-wise-unit")
        return Strategy::motif_wise_unit;
    if (name == "motif-wise-normalized")
        return Strategy::motif_wise_normalized;
    if (name == "debruijn")
        return Strategy::debruijn;
    throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::classic: return "classic";
    case Strategy::classic_undirected: return "classic-undirected";
    case Strategy::motif_based: return "motif-based";
    case Strategy::motif_wise_unit: return "motif-wise";
    case Strategy::motif_wise_normalized: return "motif-wise-normalized";
    case Strategy::debruijn: return "debruijn";
    }
    return "unknown";
}

bool is_directed(Strategy s) {
    return s != Strategy::classic_undirected && s != Strategy::motif_based;
}

Network build_network(Strategy strategy, std::span<const PassengerDay> days,
                      std::span<const DailyMotif> motifs, std::size_t station_count) {
    switch (strategy) {
    case Strategy::classic: return build_classic(motifs, station_count);
    case Strategy::classic_undirected: return symmetrize(build_classic(motifs, station_count));
    case Strategy::motif_based: return build_motif_based(motifs, station_count);
    case Strategy::motif_wise_unit:
        return build_motif_wise(motifs, station_count, MotifWeighting::unit);
    case Strategy::motif_wise_normalized:
        return build_motif_wise(motifs, station_count, MotifWeighting::normalized);
    case Strategy::debruijn: return build_debruijn(days);
    }
    throw ConfigError("unknown strategy");
}

void write_edge_list(std::ostream &out, const WeightedNetwork &g,
                     const StationUniverse &universe) {
    out << "src,dst,weight\n";
    for (const auto &[key, w] : g.edges())
        out << csv::escape(universe.id(station(key.first))) << ','
            << csv::escape(universe.id(station(key.second))) << ',' << csv::format_double(w)
            << '\n';
}

void write_edge_list(std::ostream &out, const MemoryNetwork &g, const StationUniverse &universe) {
    out << "src_i,src_j,dst_j,dst_k,weight\n";
    const auto &nodes = g.nodes();
    for (const auto &[key, w] : g.edges()) {
        const auto &a = nodes[key.first];
        const auto &b = nodes[key.second];
        out << csv::escape(universe.id(a.from)) << ',' << csv::escape(universe.id(a.to)) << ','
            << csv::escape(universe.id(b.from)) << ',' << csv::escape(universe.id(b.to)) << ','
            << w << '\n';
    }
}

} // namespace mobnet
