#pragma once

#include "mobnet/ingest.hpp"

#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace mobnet {

struct RankedStation {
    std::string station_id;
    double score = 0.0;
    std::size_t rank = 0; // 1-based
};

/// Stations by descending score, ties by ascending station id; ranks are 1..N.
struct RankingTable {
    std::vector<RankedStation> entries;
    std::string provenance;
};

RankingTable make_ranking(std::span<const double> scores, const StationUniverse &universe,
                          std::string provenance);
RankingTable make_ranking(const TruthTable &scores, std::string provenance);

/// Drops stations without truth and renumbers ranks densely.
RankingTable restrict_to_truth(const RankingTable &ranking, const TruthTable &truth);

/// Stations in `ranking` that have no truth value, in ranking order.
std::vector<std::string> excluded_stations(const RankingTable &ranking, const TruthTable &truth);

enum class NdcgMode { graded, binary };

NdcgMode parse_ndcg_mode(std::string_view text);
std::string_view to_string(NdcgMode m);

/// Cutoff meaning "all remaining stations".
inline constexpr std::size_t kAllStations = std::numeric_limits<std::size_t>::max();

/// Parses "5,10,30,inf".
std::vector<std::size_t> parse_cutoffs(std::string_view text);
std::string cutoff_label(std::size_t k);

/// NDCG@k after excluding stations without truth. k larger than the remaining station
/// count is clamped. Graded relevance is the raw truth score; binary relevance is
/// membership in the truth top-k. Throws DataError when undefined.
double ndcg(const RankingTable &ranking, const TruthTable &truth, std::size_t k, NdcgMode mode);

/// Pearson r between rank position and truth score.
double pearson_rank_vs_score(const RankingTable &ranking, const TruthTable &truth);

/// Spearman rho between ranking scores and truth (average ranks for ties).
double spearman(const RankingTable &ranking, const TruthTable &truth);

struct RankingImprovement {
    std::int64_t upper = 0;    // sum |rA - rB|
    std::int64_t relative = 0; // sum (|rA - rT| - |rB - rT|), positive: B closer to truth

    bool operator==(const RankingImprovement &) const = default;
};

/// All three tables must cover the same station set. Throws DataError otherwise.
RankingImprovement ranking_improvement(const RankingTable &a, const RankingTable &b,
                                       const RankingTable &truth_ranking);

struct EvalReport {
    std::string provenance;
    NdcgMode mode = NdcgMode::graded;
    std::optional<double> pearson_r;
    std::vector<std::pair<std::size_t, double>> ndcg;
    std::optional<RankingImprovement> improvement; // relative to a baseline ranking
    std::vector<std::string> excluded_stations;
};

EvalReport evaluate(const RankingTable &ranking, const TruthTable &truth,
                    std::span<const std::size_t> cutoffs, NdcgMode mode,
                    const RankingTable *baseline = nullptr);

void write_report_json(std::ostream &out, const EvalReport &report);
void write_ranking_csv(std::ostream &out, const RankingTable &ranking);
RankingTable read_ranking_csv(std::istream &in, std::string provenance);

} // namespace mobnet
