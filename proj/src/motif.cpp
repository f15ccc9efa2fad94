#include "mobnet/motif.hpp"

#include "mobnet/csv.hpp"
#include "mobnet/error.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace mobnet {

namespace {

// Bit position of ordered pair (i,j), i != j, on n nodes. Earlier pairs get higher bits.
constexpr unsigned pair_bit(std::uint32_t i, std::uint32_t j, std::uint32_t n) {
    const std::uint32_t rank = i * (n - 1) + (j < i ? j : j - 1);
    return n * (n - 1) - 1 - rank;
}

} // namespace

std::uint64_t DailyMotif::trip_count() const {
    std::uint64_t total = 0;
    for (const auto &[pair, count] : edges)
        total += count;
    return total;
}

std::uint32_t DailyMotif::in_strength(StationId s) const {
    std::uint32_t total = 0;
    for (const auto &[pair, count] : edges)
        if (pair.second == s)
            total += count;
    return total;
}

DailyMotif build_motif(const PassengerDay &day) {
    if (day.trips.empty())
        throw ConfigError("build_motif: passenger day has no trips");
    DailyMotif m;
    m.card_id = day.card_id;
    m.date = day.date;
    m.initial = day.trips.front().origin;
    for (const auto &t : day.trips) {
        if (t.origin == t.destination)
            throw DataError("build_motif: self-loop trip for card '" + day.card_id + "'");
        ++m.edges[{t.origin, t.destination}];
        m.nodes.push_back(t.origin);
        m.nodes.push_back(t.destination);
    }
    std::sort(m.nodes.begin(), m.nodes.end());
    m.nodes.erase(std::unique(m.nodes.begin(), m.nodes.end()), m.nodes.end());
    return m;
}

std::vector<DailyMotif> build_motifs(std::span<const PassengerDay> days) {
    std::vector<DailyMotif> out;
    out.reserve(days.size());
    for (const auto &d : days)
        out.push_back(build_motif(d));
    return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> CanonicalMotif::edges() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    if (overflow)
        return out;
    const std::uint32_t n = node_count;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j)
            if (i != j && (code >> pair_bit(i, j, n) & 1u))
                out.emplace_back(i, j);
    return out;
}

std::string CanonicalMotif::edge_encoding() const {
    if (overflow)
        return "overflow";
    std::string out;
    for (auto [i, j] : edges()) {
        if (!out.empty())
            out.push_back(';');
        out += std::to_string(i) + '>' + std::to_string(j);
    }
    return out;
}

bool canonical_less(const CanonicalMotif &a, const CanonicalMotif &b) {
    if (a.overflow != b.overflow)
        return b.overflow;
    if (a.node_count != b.node_count)
        return a.node_count < b.node_count;
    if (a.code == b.code)
        return false;
    const auto ea = a.edges(), eb = b.edges();
    return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

CanonicalMotif canonical_form(std::size_t node_count,
                              std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
                              std::size_t cap) {
    if (cap > kMaxCanonicalNodes)
        throw ConfigError("canonical_form: node cap cannot exceed " +
                          std::to_string(kMaxCanonicalNodes));
    if (node_count > cap)
        return CanonicalMotif::overflow_class();
    const auto n = static_cast<std::uint32_t>(node_count);
    for (auto [i, j] : edges)
        if (i >= n || j >= n || i == j)
            throw ConfigError("canonical_form: edge endpoint out of range or self-loop");

    // perm[v] is the new label of node v
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::uint64_t best = 0;
    do {
        std::uint64_t code = 0;
        for (auto [i, j] : edges)
            code |= std::uint64_t{1} << pair_bit(perm[i], perm[j], n);
        best = std::max(best, code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {n, best, false};
}

CanonicalMotif canonical_form(const DailyMotif &m, std::size_t cap) {
    if (m.nodes.size() > cap) {
        if (cap > kMaxCanonicalNodes)
            throw ConfigError("canonical_form: node cap cannot exceed " +
                              std::to_string(kMaxCanonicalNodes));
        return CanonicalMotif::overflow_class();
    }
    auto local = [&](StationId s) {
        return static_cast<std::uint32_t>(
            std::lower_bound(m.nodes.begin(), m.nodes.end(), s) - m.nodes.begin());
    };
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(m.edges.size());
    for (const auto &[pair, count] : m.edges)
        edges.emplace_back(local(pair.first), local(pair.second));
    return canonical_form(m.nodes.size(), edges, cap);
}

std::vector<MotifShare> motif_distribution(std::span<const DailyMotif> motifs, std::size_t top_k,
                                           std::size_t cap) {
    if (motifs.empty())
        throw ConfigError("motif_distribution: no motifs");

    struct KeyHash {
        std::size_t operator()(const CanonicalMotif &c) const noexcept {
            return std::hash<std::uint64_t>{}(c.code * 31 + c.node_count) ^ c.overflow;
        }
    };
    std::unordered_map<CanonicalMotif, std::uint64_t, KeyHash> counts;
    for (const auto &m : motifs)
        ++counts[canonical_form(m, cap)];

    std::vector<MotifShare> out;
    out.reserve(counts.size());
    const double total = static_cast<double>(motifs.size());
    for (const auto &[motif, count] : counts)
        out.push_back({motif, count, static_cast<double>(count) / total});
    std::sort(out.begin(), out.end(), [](const MotifShare &a, const MotifShare &b) {
        if (a.count != b.count)
            return a.count > b.count;
        return canonical_less(a.motif, b.motif);
    });
    if (out.size() > top_k)
        out.resize(top_k);
    return out;
}

void write_motif_distribution(std::ostream &out, std::span<const MotifShare> shares) {
    out << "canonical_id,node_count,edge_encoding,count,share\n";
    std::size_t id = 1;
    for (const auto &s : shares) {
        out << id++ << ',' << s.motif.node_count << ',' << s.motif.edge_encoding() << ','
            << s.count << ',' << csv::format_double(s.share) << '\n';
    }
}

} // namespace mobnet
