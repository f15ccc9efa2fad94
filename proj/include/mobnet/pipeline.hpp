#pragma once

#include "mobnet/centrality.hpp"
#include "mobnet/eval.hpp"
#include "mobnet/ingest.hpp"
#include "mobnet/netbuild.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mobnet {

struct PipelineConfig {
    std::filesystem::path records_path;
    std::filesystem::path stations_path;
    std::filesystem::path output_dir;
    std::vector<Strategy> strategies; // first entry is the improvement baseline
    std::vector<Measure> measures;    // empty: every measure applicable to each strategy
    std::vector<std::size_t> cutoffs{5, 10, 30, kAllStations};
    NdcgMode mode = NdcgMode::graded;
    IngestConfig ingest;
    SolverConfig solver;
    std::size_t threads = 1;
    std::size_t motif_top_k = 15;
};

bool is_applicable(Strategy s, Measure m);

/// Throws ConfigError for fewer than two strategies, duplicate entries, an invalid
/// strategy/measure pairing, or bad solver settings.
void validate(const PipelineConfig &cfg);

/// Strategy x measure cells in evaluation order.
std::vector<std::pair<Strategy, Measure>> comparison_grid(const PipelineConfig &cfg);

/// Station-level scores for any network; memory-network scores are projected to stations.
ScoreVector score_network(const Network &network, Measure m, const SolverConfig &cfg,
                          std::size_t station_count);

struct CellResult {
    Strategy strategy;
    Measure measure;
    std::optional<RankingTable> ranking;
    std::optional<EvalReport> report;
    std::string error; // non-empty when the cell failed
};

struct ImprovementRow {
    Strategy baseline;
    Strategy strategy;
    Measure measure;
    RankingImprovement improvement;
};

struct CompareResult {
    std::vector<CellResult> cells;
    std::vector<ImprovementRow> improvements;
};

/// In-memory comparison over already-partitioned passenger days.
CompareResult compare(const StationUniverse &universe, std::span<const PassengerDay> days,
                      const PipelineConfig &cfg);

/// `strategy,measure,r,ndcg@k...`; failed cells carry "error" in every metric column.
void write_comparison_matrix(std::ostream &out, const CompareResult &result,
                             std::span<const std::size_t> cutoffs);
/// `baseline,strategy,measure,upper,relative`
void write_improvements(std::ostream &out, const CompareResult &result);

struct CompareSummary {
    std::size_t cells = 0;
    std::size_t failed_cells = 0;
};

/// Reads inputs, runs the grid and writes every artifact into cfg.output_dir.
CompareSummary run_compare(const PipelineConfig &cfg);

} // namespace mobnet
