#include "mobnet/pipeline.hpp"

#include "mobnet/csv.hpp"
#include "mobnet/error.hpp"
#include "mobnet/motif.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <thread>

namespace mobnet {

namespace {

constexpr Measure kAllMeasures[] = {Measure::pagerank, Measure::eigenvector,
                                    Measure::current_flow_closeness, Measure::clustering};

std::string cell_name(Strategy s, Measure m) {
    return std::string(to_string(s)) + "_" + std::string(to_string(m));
}

std::ofstream open_output(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    return out;
}

std::ifstream open_input(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    return in;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn fn) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                fn(i);
        });
}

} // namespace

bool is_applicable(Strategy s, Measure m) { return !requires_undirected(m) || !is_directed(s); }

void validate(const PipelineConfig &cfg) {
    if (cfg.strategies.size() < 2)
        throw ConfigError("compare needs at least two strategies");
    if (std::set(cfg.strategies.begin(), cfg.strategies.end()).size() != cfg.strategies.size())
        throw ConfigError("duplicate strategy in compare list");
    if (std::set(cfg.measures.begin(), cfg.measures.end()).size() != cfg.measures.size())
        throw ConfigError("duplicate measure in compare list");
    for (auto s : cfg.strategies)
        for (auto m : cfg.measures)
            if (!is_applicable(s, m))
                throw ConfigError("measure '" + std::string(to_string(m)) +
                                  "' requires an undirected network, but strategy '" +
                                  std::string(to_string(s)) + "' is directed");
    if (cfg.cutoffs.empty())
        throw ConfigError("no NDCG cutoffs given");
    if (cfg.threads == 0)
        throw ConfigError("threads must be positive");
    cfg.solver.validate();
}

std::vector<std::pair<Strategy, Measure>> comparison_grid(const PipelineConfig &cfg) {
    std::vector<std::pair<Strategy, Measure>> grid;
    for (auto s : cfg.strategies) {
        if (cfg.measures.empty()) {
            for (auto m : kAllMeasures)
                if (is_applicable(s, m))
                    grid.emplace_back(s, m);
        } else {
            for (auto m : cfg.measures)
                grid.emplace_back(s, m);
        }
    }
    return grid;
}

ScoreVector score_network(const Network &network, Measure m, const SolverConfig &cfg,
                          std::size_t station_count) {
    if (const auto *g = std::get_if<WeightedNetwork>(&network))
        return compute_centrality(m, *g, cfg);
    const auto &memory = std::get<MemoryNetwork>(network);
    if (requires_undirected(m))
        throw ConfigError(std::string(to_string(m)) + " is not defined on memory networks");
    if (memory.nodes().empty())
        throw DataError("memory network is empty (no day has two or more trips)");
    return project_memory_scores(compute_centrality(m, memory.to_weighted(), cfg), memory,
                                 station_count);
}

CompareResult compare(const StationUniverse &universe, std::span<const PassengerDay> days,
                      const PipelineConfig &cfg) {
    validate(cfg);
    const auto truth = universe.truth();
    if (truth.empty())
        throw DataError("station universe carries no ground-truth scores");
    const auto motifs = build_motifs(days);

    std::vector<Network> networks;
    networks.reserve(cfg.strategies.size());
    for (auto s : cfg.strategies)
        networks.push_back(build_network(s, days, motifs, universe.size()));

    const auto grid = comparison_grid(cfg);
    CompareResult result;
    result.cells.resize(grid.size());
    parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
        auto &cell = result.cells[i];
        cell.strategy = grid[i].first;
        cell.measure = grid[i].second;
        const auto pos = std::find(cfg.strategies.begin(), cfg.strategies.end(), cell.strategy) -
                         cfg.strategies.begin();
        try {
            const auto scores = score_network(networks[static_cast<std::size_t>(pos)],
                                              cell.measure, cfg.solver, universe.size());
            cell.ranking = make_ranking(scores.scores, universe, cell_name(cell.strategy, cell.measure));
        } catch (const SolverError &e) {
            cell.error = e.what();
        } catch (const DataError &e) {
            cell.error = e.what();
        }
    });

    // Evaluation, with the first strategy's ranking as the improvement baseline.
    const auto truth_ranking = restrict_to_truth(make_ranking(truth, "truth"), truth);
    for (auto &cell : result.cells) {
        if (!cell.ranking)
            continue;
        const RankingTable *baseline = nullptr;
        if (cell.strategy != cfg.strategies.front()) {
            for (const auto &other : result.cells)
                if (other.strategy == cfg.strategies.front() && other.measure == cell.measure &&
                    other.ranking)
                    baseline = &*other.ranking;
        }
        try {
            cell.report = evaluate(*cell.ranking, truth, cfg.cutoffs, cfg.mode, baseline);
            if (baseline)
                result.improvements.push_back({cfg.strategies.front(), cell.strategy,
                                               cell.measure, *cell.report->improvement});
        } catch (const DataError &e) {
            cell.error = e.what();
        }
    }
    return result;
}

void write_comparison_matrix(std::ostream &out, const CompareResult &result,
                             std::span<const std::size_t> cutoffs) {
    out << "strategy,measure,r";
    for (auto k : cutoffs)
        out << ",ndcg@" << cutoff_label(k);
    out << '\n';
    for (const auto &cell : result.cells) {
        out << to_string(cell.strategy) << ',' << to_string(cell.measure);
        if (!cell.error.empty() || !cell.report) {
            for (std::size_t i = 0; i <= cutoffs.size(); ++i)
                out << ",error";
        } else {
            out << ',' << (cell.report->pearson_r ? csv::format_double(*cell.report->pearson_r) : "");
            for (const auto &[k, v] : cell.report->ndcg)
                out << ',' << csv::format_double(v);
        }
        out << '\n';
    }
}

void write_improvements(std::ostream &out, const CompareResult &result) {
    out << "baseline,strategy,measure,upper,relative\n";
    for (const auto &row : result.improvements)
        out << to_string(row.baseline) << ',' << to_string(row.strategy) << ','
            << to_string(row.measure) << ',' << row.improvement.upper << ','
            << row.improvement.relative << '\n';
}

CompareSummary run_compare(const PipelineConfig &cfg) {
    validate(cfg);
    auto stations_in = open_input(cfg.stations_path);
    const auto universe = StationUniverse::read_csv(stations_in);
    auto records_in = open_input(cfg.records_path);
    const auto parsed = parse_records(records_in, universe, cfg.ingest);
    const auto days = partition_by_day(parsed.records);
    if (days.empty())
        throw DataError("no usable trip records");

    std::filesystem::create_directories(cfg.output_dir);
    const auto &dir = cfg.output_dir;
    {
        auto out = open_output(dir / "rejects.csv");
        write_reject_report(out, parsed.rejected);
    }
    const auto motifs = build_motifs(days);
    {
        auto out = open_output(dir / "motifs.csv");
        write_motif_distribution(out, motif_distribution(motifs, cfg.motif_top_k));
    }
    for (auto s : cfg.strategies) {
        auto out = open_output(dir / ("network_" + std::string(to_string(s)) + ".csv"));
        std::visit([&](const auto &g) { write_edge_list(out, g, universe); },
                   build_network(s, days, motifs, universe.size()));
    }

    const auto result = compare(universe, days, cfg);
    CompareSummary summary;
    for (const auto &cell : result.cells) {
        ++summary.cells;
        const auto name = cell_name(cell.strategy, cell.measure);
        if (cell.ranking) {
            auto out = open_output(dir / ("ranking_" + name + ".csv"));
            write_ranking_csv(out, *cell.ranking);
        }
        if (cell.report) {
            auto out = open_output(dir / ("report_" + name + ".json"));
            write_report_json(out, *cell.report);
        }
        if (!cell.error.empty())
            ++summary.failed_cells;
    }
    {
        auto out = open_output(dir / "matrix.csv");
        write_comparison_matrix(out, result, cfg.cutoffs);
    }
    {
        auto out = open_output(dir / "improvements.csv");
        write_improvements(out, result);
    }
    {
        auto out = open_output(dir / "errors.csv");
        out << "strategy,measure,message\n";
        for (const auto &cell : result.cells)
            if (!cell.error.empty())
                out << to_string(cell.strategy) << ',' << to_string(cell.measure) << ','
                    << csv::escape(cell.error) << '\n';
    }
    return summary;
}

} // namespace mobnet
