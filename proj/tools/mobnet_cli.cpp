// mobnet: mobility-motif network construction, ranking and evaluation.

#include "mobnet/centrality.hpp"
#include "mobnet/csv.hpp"
#include "mobnet/error.hpp"
#include "mobnet/eval.hpp"
#include "mobnet/ingest.hpp"
#include "mobnet/motif.hpp"
#include "mobnet/netbuild.hpp"
#include "mobnet/pipeline.hpp"
#include "mobnet/synthgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace mobnet;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kDataError = 2, kSolverError = 3 };

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    std::string out_dir;
};

struct InputOptions {
    std::string records;
    std::string stations;
    std::string days = "all";
    long utc_offset = 0;
};

void add_input_options(CLI::App *cmd, InputOptions &in) {
    cmd->add_option("--records", in.records, "trip records CSV")->required();
    cmd->add_option("--stations", in.stations, "station universe CSV")->required();
    cmd->add_option("--days", in.days, "all | weekdays | weekends");
    cmd->add_option("--utc-offset", in.utc_offset, "seconds added to epoch timestamps");
}

std::ifstream open_input(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path);
    return in;
}

struct Loaded {
    StationUniverse universe;
    ParseResult parsed;
    std::vector<PassengerDay> days;
};

Loaded load(const InputOptions &opts) {
    Loaded l;
    auto stations = open_input(opts.stations);
    l.universe = StationUniverse::read_csv(stations);
    IngestConfig cfg;
    cfg.day_filter = parse_day_filter(opts.days);
    cfg.utc_offset = std::chrono::seconds{opts.utc_offset};
    auto records = open_input(opts.records);
    l.parsed = parse_records(records, l.universe, cfg);
    l.days = partition_by_day(l.parsed.records);
    if (!l.parsed.rejected.empty())
        std::cerr << "note: " << l.parsed.rejected.size() << " rows rejected\n";
    return l;
}

/// Writes to `explicit_path`, else `out_dir/default_name`, else stdout.
template <typename Fn>
void emit(const std::string &explicit_path, const GlobalOptions &global,
          const std::string &default_name, Fn write) {
    fs::path path;
    if (!explicit_path.empty())
        path = explicit_path;
    else if (!global.out_dir.empty())
        path = fs::path(global.out_dir) / default_name;
    if (path.empty()) {
        write(std::cout);
        return;
    }
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    write(out);
}

Strategy strategy_from(const std::string &name, const std::string &weighting) {
    auto s = parse_strategy(name);
    if (weighting != "unit" && weighting != "normalized")
        throw ConfigError("weighting must be unit or normalized");
    if (weighting == "normalized") {
        if (s != Strategy::motif_wise_unit && s != Strategy::motif_wise_normalized)
            throw ConfigError("--weighting applies to the motif-wise strategy only");
        s = Strategy::motif_wise_normalized;
    }
    return s;
}

std::vector<std::string> split_list(const std::string &text) {
    std::vector<std::string> out;
    for (auto &f : csv::split(text))
        if (!csv::trim(f).empty())
            out.emplace_back(csv::trim(f));
    return out;
}

std::map<std::string, std::string> read_settings(const std::string &path,
                                                 const std::vector<std::string> &overrides) {
    std::map<std::string, std::string> settings;
    auto put = [&](std::string_view line) {
        line = csv::trim(line);
        if (line.empty() || line.front() == '#')
            return;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("setting '" + std::string(line) + "' is not key=value");
        settings[std::string(csv::trim(line.substr(0, eq)))] =
            std::string(csv::trim(line.substr(eq + 1)));
    };
    if (!path.empty()) {
        auto in = open_input(path);
        while (auto line = csv::read_line(in))
            put(*line);
    }
    for (const auto &o : overrides)
        put(o);
    return settings;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Mobility-motif networks: build, rank and evaluate station importance"};
    app.require_subcommand(1);
    GlobalOptions global;
    app.add_option("--seed", global.seed, "random seed (synth)");
    app.add_option("--threads", global.threads, "worker threads for compare")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", global.out_dir, "output directory");

    // ingest
    InputOptions ingest_in;
    auto *ingest = app.add_subcommand("ingest", "clean records and report rejected rows");
    add_input_options(ingest, ingest_in);

    // motifs
    InputOptions motifs_in;
    std::size_t top_k = 15, cap = kMaxCanonicalNodes;
    std::string motifs_out;
    auto *motifs = app.add_subcommand("motifs", "daily motif class distribution");
    add_input_options(motifs, motifs_in);
    motifs->add_option("--top-k", top_k, "number of classes to report");
    motifs->add_option("--cap", cap, "largest motif canonicalized exactly (<= 8)");
    motifs->add_option("--out", motifs_out, "output CSV");

    // build
    InputOptions build_in;
    std::string build_strategy, build_weighting = "unit", build_out;
    auto *build = app.add_subcommand("build", "aggregate motifs into a network edge list");
    add_input_options(build, build_in);
    build->add_option("--strategy", build_strategy,
                      "classic | classic-undirected | motif-based | motif-wise | debruijn")
        ->required();
    build->add_option("--weighting", build_weighting, "unit | normalized (motif-wise)");
    build->add_option("--out", build_out, "output CSV");

    // rank
    InputOptions rank_in;
    std::string rank_strategy, rank_weighting = "unit", rank_measure, rank_out;
    SolverConfig rank_solver;
    auto *rank = app.add_subcommand("rank", "rank stations by a centrality measure");
    add_input_options(rank, rank_in);
    rank->add_option("--strategy", rank_strategy, "network strategy")->required();
    rank->add_option("--weighting", rank_weighting, "unit | normalized (motif-wise)");
    rank->add_option("--measure", rank_measure, "pagerank | eigenvector | currentflow | clustering")
        ->required();
    rank->add_option("--damping", rank_solver.damping, "PageRank damping");
    rank->add_option("--tol", rank_solver.tolerance, "L1 convergence tolerance");
    rank->add_option("--max-iter", rank_solver.max_iterations, "iteration limit");
    rank->add_option("--out", rank_out, "output CSV");

    // eval
    std::vector<std::string> eval_rankings;
    std::string eval_truth, eval_k = "5,10,30,inf", eval_mode = "graded", eval_out, eval_matrix;
    auto *eval = app.add_subcommand("eval", "score rankings against ground truth");
    eval->add_option("--ranking", eval_rankings, "ranking CSV (repeatable; first is the baseline)")
        ->required();
    eval->add_option("--truth", eval_truth, "station universe CSV with ground truth")->required();
    eval->add_option("--k", eval_k, "NDCG cutoffs, e.g. 5,10,30,inf");
    eval->add_option("--mode", eval_mode, "graded | binary");
    eval->add_option("--out", eval_out, "JSON report");
    eval->add_option("--matrix", eval_matrix, "comparison matrix CSV");

    // synth
    std::string synth_config, synth_out, synth_truth;
    std::vector<std::string> synth_set;
    auto *synth = app.add_subcommand("synth", "generate a synthetic corpus with planted importance");
    synth->add_option("--config", synth_config, "key=value settings file");
    synth->add_option("--set", synth_set, "key=value override (repeatable)");
    synth->add_option("--out", synth_out, "records CSV")->required();
    synth->add_option("--truth", synth_truth, "station universe CSV")->required();

    // compare
    InputOptions compare_in;
    std::string compare_strategies, compare_measures, compare_k = "5,10,30,inf",
                                                      compare_mode = "graded";
    SolverConfig compare_solver;
    std::size_t compare_top_k = 15;
    auto *compare_cmd = app.add_subcommand("compare", "strategy x measure comparison grid");
    add_input_options(compare_cmd, compare_in);
    compare_cmd->add_option("--strategies", compare_strategies, "comma list; first is the baseline")
        ->required();
    compare_cmd->add_option("--measures", compare_measures, "comma list (default: all applicable)");
    compare_cmd->add_option("--k", compare_k, "NDCG cutoffs");
    compare_cmd->add_option("--mode", compare_mode, "graded | binary");
    compare_cmd->add_option("--damping", compare_solver.damping, "PageRank damping");
    compare_cmd->add_option("--tol", compare_solver.tolerance, "L1 convergence tolerance");
    compare_cmd->add_option("--max-iter", compare_solver.max_iterations, "iteration limit");
    compare_cmd->add_option("--top-k", compare_top_k, "motif classes to report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*ingest) {
            const auto l = load(ingest_in);
            emit("", global, "trips.csv",
                 [&](std::ostream &out) { write_records(out, l.parsed.records, l.universe); });
            if (!global.out_dir.empty())
                emit("", global, "rejects.csv", [&](std::ostream &out) {
                    write_reject_report(out, l.parsed.rejected);
                });
            else
                write_reject_report(std::cerr, l.parsed.rejected);
            std::cerr << "accepted " << l.parsed.records.size() << ", rejected "
                      << l.parsed.rejected.size() << ", filtered " << l.parsed.filtered_out
                      << ", passenger-days " << l.days.size() << '\n';
        } else if (*motifs) {
            const auto l = load(motifs_in);
            const auto ms = build_motifs(l.days);
            const auto dist = motif_distribution(ms, top_k, cap);
            emit(motifs_out, global, "motifs.csv",
                 [&](std::ostream &out) { write_motif_distribution(out, dist); });
        } else if (*build) {
            const auto strategy = strategy_from(build_strategy, build_weighting);
            const auto l = load(build_in);
            const auto ms = build_motifs(l.days);
            const auto network = build_network(strategy, l.days, ms, l.universe.size());
            emit(build_out, global, "network_" + std::string(to_string(strategy)) + ".csv",
                 [&](std::ostream &out) {
                     std::visit([&](const auto &g) { write_edge_list(out, g, l.universe); },
                                network);
                 });
        } else if (*rank) {
            const auto strategy = strategy_from(rank_strategy, rank_weighting);
            const auto measure = parse_measure(rank_measure);
            if (!is_applicable(strategy, measure))
                throw ConfigError(std::string(rank_measure) + " requires an undirected strategy");
            rank_solver.validate();
            const auto l = load(rank_in);
            const auto ms = build_motifs(l.days);
            const auto network = build_network(strategy, l.days, ms, l.universe.size());
            const auto scores = score_network(network, measure, rank_solver, l.universe.size());
            const auto table = make_ranking(scores.scores, l.universe,
                                            std::string(to_string(strategy)) + "_" +
                                                std::string(to_string(measure)));
            emit(rank_out, global, "ranking_" + table.provenance + ".csv",
                 [&](std::ostream &out) { write_ranking_csv(out, table); });
        } else if (*eval) {
            auto truth_in = open_input(eval_truth);
            const auto truth = StationUniverse::read_csv(truth_in).truth();
            const auto cutoffs = parse_cutoffs(eval_k);
            const auto mode = parse_ndcg_mode(eval_mode);
            std::vector<RankingTable> tables;
            for (const auto &path : eval_rankings) {
                auto in = open_input(path);
                tables.push_back(read_ranking_csv(in, fs::path(path).stem().string()));
            }
            std::vector<EvalReport> reports;
            for (std::size_t i = 0; i < tables.size(); ++i) {
                reports.push_back(evaluate(tables[i], truth, cutoffs, mode,
                                           i == 0 ? nullptr : &tables.front()));
            }
            emit(eval_out, global, "report.json", [&](std::ostream &out) {
                if (reports.size() == 1) {
                    write_report_json(out, reports.front());
                    return;
                }
                out << "[\n";
                for (std::size_t i = 0; i < reports.size(); ++i) {
                    write_report_json(out, reports[i]);
                    if (i + 1 < reports.size())
                        out << ",\n";
                }
                out << "]\n";
            });
            if (!eval_matrix.empty() || !global.out_dir.empty())
                emit(eval_matrix, global, "matrix.csv", [&](std::ostream &out) {
                    out << "ranking,r";
                    for (auto k : cutoffs)
                        out << ",ndcg@" << cutoff_label(k);
                    out << ",improvement_upper,improvement_relative\n";
                    for (const auto &r : reports) {
                        out << csv::escape(r.provenance) << ','
                            << (r.pearson_r ? csv::format_double(*r.pearson_r) : "");
                        for (const auto &[k, v] : r.ndcg)
                            out << ',' << csv::format_double(v);
                        if (r.improvement)
                            out << ',' << r.improvement->upper << ',' << r.improvement->relative;
                        else
                            out << ",,";
                        out << '\n';
                    }
                });
        } else if (*synth) {
            auto settings = read_settings(synth_config, synth_set);
            if (global.seed)
                settings["seed"] = std::to_string(*global.seed);
            const auto corpus = generate(synth_config_from(settings));
            emit(synth_out, global, "records.csv", [&](std::ostream &out) {
                write_records(out, corpus.records, corpus.stations);
            });
            emit(synth_truth, global, "stations.csv",
                 [&](std::ostream &out) { corpus.stations.write_csv(out); });
        } else if (*compare_cmd) {
            if (global.out_dir.empty())
                throw ConfigError("compare requires --out-dir");
            PipelineConfig cfg;
            cfg.records_path = compare_in.records;
            cfg.stations_path = compare_in.stations;
            cfg.output_dir = global.out_dir;
            for (const auto &s : split_list(compare_strategies))
                cfg.strategies.push_back(parse_strategy(s));
            for (const auto &m : split_list(compare_measures))
                cfg.measures.push_back(parse_measure(m));
            cfg.cutoffs = parse_cutoffs(compare_k);
            cfg.mode = parse_ndcg_mode(compare_mode);
            cfg.ingest.day_filter = parse_day_filter(compare_in.days);
            cfg.ingest.utc_offset = std::chrono::seconds{compare_in.utc_offset};
            cfg.solver = compare_solver;
            cfg.threads = global.threads;
            cfg.motif_top_k = compare_top_k;
            const auto summary = run_compare(cfg);
            if (summary.failed_cells > 0)
                std::cerr << "warning: " << summary.failed_cells << " of " << summary.cells
                          << " cells failed; see errors.csv\n";
        }
    } catch (const ConfigError &e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const SolverError &e) {
        std::cerr << "solver failure: " << e.what() << " (iterations " << e.iterations()
                  << ", residual " << e.residual() << ")\n";
        return kSolverError;
    } catch (const DataError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}
