#pragma once

#include "mobnet/ingest.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mobnet {

using StationPair = std::pair<StationId, StationId>;

/// One passenger's trips on one day as a directed multigraph.
struct DailyMotif {
    std::string card_id;
    std::chrono::year_month_day date;
    StationId initial;                      // origin of the day's first trip
    std::vector<StationId> nodes;           // sorted, unique
    std::map<StationPair, std::uint32_t> edges; // trip multiplicities, never (i,i)

    std::uint64_t trip_count() const;
    /// Number of trips arriving at `s` within the motif.
    std::uint32_t in_strength(StationId s) const;
};

DailyMotif build_motif(const PassengerDay &day);
std::vector<DailyMotif> build_motifs(std::span<const PassengerDay> days);

/// Largest motif that can be canonicalized exactly (adjacency fits 64 bits).
inline constexpr std::size_t kMaxCanonicalNodes = 8;

/// Isomorphism class of a motif's unweighted digraph.
///
/// `code` holds the relabeled adjacency with ordered pairs (0,1),(0,2),...,(n-1,n-2)
/// laid out from the most significant used bit down. The canonical labeling is the
/// one with the maximal code, which is the labeling whose sorted edge list is
/// lexicographically smallest. Motifs above the node cap collapse into one overflow
/// class.
struct CanonicalMotif {
    std::uint32_t node_count = 0;
    std::uint64_t code = 0;
    bool overflow = false;

    static CanonicalMotif overflow_class() { return {0, 0, true}; }

    /// Edges of the canonical labeling, sorted.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;
    /// "0>1;1>0" style rendering, or "overflow".
    std::string edge_encoding() const;

    bool operator==(const CanonicalMotif &) const = default;
};

/// Ordering used for reports: node count ascending, then edge list lexicographically,
/// overflow class last.
bool canonical_less(const CanonicalMotif &a, const CanonicalMotif &b);

/// Canonical form of an arbitrary digraph on nodes 0..n-1 (duplicate edges ignored).
CanonicalMotif canonical_form(std::size_t node_count,
                              std::span<const std::pair<std::uint32_t, std::uint32_t>> edges,
                              std::size_t cap = kMaxCanonicalNodes);

CanonicalMotif canonical_form(const DailyMotif &m, std::size_t cap = kMaxCanonicalNodes);

struct MotifShare {
    CanonicalMotif motif;
    std::uint64_t count = 0;
    double share = 0.0; // count / total motifs
};

/// Most common classes, by descending count with canonical_less breaking ties.
std::vector<MotifShare> motif_distribution(std::span<const DailyMotif> motifs,
                                           std::size_t top_k,
                                           std::size_t cap = kMaxCanonicalNodes);

/// `canonical_id,node_count,edge_encoding,count,share`
void write_motif_distribution(std::ostream &out, std::span<const MotifShare> shares);

} // namespace mobnet
