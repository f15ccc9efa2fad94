#include "fixtures.hpp"

#include "mobnet/csv.hpp"
#include "mobnet/error.hpp"
#include "mobnet/pipeline.hpp"
#include "mobnet/synthgen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mobnet;
using namespace mobnet::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const auto dir = fs::temp_directory_path() / ("mobnet_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path &p, const std::string &text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Stations A-E with ground truth and the three-passenger trips, on disk.
fs::path three_passenger_inputs(const std::string &name) {
    const auto dir = scratch(name);
    std::ostringstream stations;
    letters().write_csv(stations);
    write_file(dir / "stations.csv", stations.str());
    write_file(dir / "records.csv", three_passenger_csv());
    return dir;
}

std::vector<std::string> lines(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

const std::vector<Strategy> kAll{Strategy::classic,         Strategy::classic_undirected,
                                 Strategy::motif_based,     Strategy::motif_wise_unit,
                                 Strategy::motif_wise_normalized, Strategy::debruijn};

} // namespace

TEST(pipeline, validation_rules) {
    PipelineConfig cfg;
    cfg.strategies = {Strategy::classic};
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg.strategies = {Strategy::classic, Strategy::classic};
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg.strategies = {Strategy::classic, Strategy::motif_wise_unit};
    cfg.measures = {Measure::clustering};
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg.measures = {Measure::pagerank};
    EXPECT_NO_THROW(validate(cfg));
    cfg.solver.damping = 1.5;
    EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(pipeline, applicability) {
    EXPECT_TRUE(is_applicable(Strategy::motif_based, Measure::clustering));
    EXPECT_TRUE(is_applicable(Strategy::classic_undirected, Measure::current_flow_closeness));
    EXPECT_FALSE(is_applicable(Strategy::classic, Measure::current_flow_closeness));
    EXPECT_FALSE(is_applicable(Strategy::debruijn, Measure::clustering));
    EXPECT_TRUE(is_applicable(Strategy::debruijn, Measure::pagerank));
}

TEST(pipeline, two_by_one_matrix_shape) {
    const auto corpus = generate(synth_config_from({{"stations", "20"}, {"passengers", "200"}}));
    const auto days = partition_by_day(corpus.records);
    PipelineConfig cfg;
    cfg.strategies = {Strategy::classic_undirected, Strategy::motif_based};
    cfg.measures = {Measure::pagerank};
    const auto result = compare(corpus.stations, days, cfg);
    ASSERT_EQ(result.cells.size(), 2u);
    std::ostringstream out;
    write_comparison_matrix(out, result, cfg.cutoffs);
    const auto rows = lines(out.str());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], "strategy,measure,r,ndcg@5,ndcg@10,ndcg@30,ndcg@inf");
    for (std::size_t i = 1; i < rows.size(); ++i)
        EXPECT_EQ(csv::split(rows[i]).size(), 7u);
    ASSERT_EQ(result.improvements.size(), 1u);
    EXPECT_EQ(result.improvements[0].baseline, Strategy::classic_undirected);
}

TEST(pipeline, three_passenger_full_grid) {
    const auto u = letters();
    const auto days = three_passenger_days();
    PipelineConfig cfg;
    cfg.strategies = kAll;
    const auto result = compare(u, days, cfg);
    // directed networks get pagerank + eigenvector, undirected ones all four
    EXPECT_EQ(result.cells.size(), 4u * 2 + 2u * 4);
    for (const auto &cell : result.cells) {
        const bool acyclic = cell.strategy == Strategy::motif_wise_unit ||
                             cell.strategy == Strategy::motif_wise_normalized ||
                             cell.strategy == Strategy::debruijn;
        if (cell.measure == Measure::eigenvector && acyclic) {
            EXPECT_FALSE(cell.error.empty()) << to_string(cell.strategy);
            continue;
        }
        ASSERT_TRUE(cell.error.empty()) << to_string(cell.strategy) << "/"
                                         << to_string(cell.measure) << ": " << cell.error;
        ASSERT_TRUE(cell.report);
        ASSERT_TRUE(cell.report->pearson_r);
        EXPECT_TRUE(std::isfinite(*cell.report->pearson_r));
        for (const auto &[k, v] : cell.report->ndcg)
            EXPECT_TRUE(std::isfinite(v) && v >= 0 && v <= 1 + 1e-15);
    }
}

TEST(pipeline, thread_count_does_not_change_results) {
    const auto corpus = generate(synth_config_from({{"stations", "25"}, {"passengers", "300"}}));
    const auto days = partition_by_day(corpus.records);
    PipelineConfig cfg;
    cfg.strategies = kAll;
    std::string reference;
    for (std::size_t threads : {1u, 3u, 8u}) {
        cfg.threads = threads;
        std::ostringstream out;
        const auto result = compare(corpus.stations, days, cfg);
        write_comparison_matrix(out, result, cfg.cutoffs);
        write_improvements(out, result);
        if (reference.empty())
            reference = out.str();
        EXPECT_EQ(out.str(), reference);
    }
}

TEST(pipeline, run_compare_writes_artifacts_deterministically) {
    const auto in = three_passenger_inputs("determinism");
    PipelineConfig cfg;
    cfg.records_path = in / "records.csv";
    cfg.stations_path = in / "stations.csv";
    cfg.strategies = kAll;
    cfg.threads = 4;
    cfg.output_dir = in / "run1";
    const auto s1 = run_compare(cfg);
    cfg.output_dir = in / "run2";
    run_compare(cfg);
    EXPECT_EQ(s1.cells, 16u);
    EXPECT_EQ(s1.failed_cells, 3u);

    std::size_t files = 0;
    for (const auto &entry : fs::directory_iterator(in / "run1")) {
        ++files;
        const auto other = in / "run2" / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(read_file(entry.path()), read_file(other)) << entry.path().filename();
    }
    // rejects, motifs, errors, matrix, improvements, 6 networks, 13 rankings + 13 reports
    EXPECT_EQ(files, 5u + 6u + 13u * 2);
    const auto matrix = lines(read_file(in / "run1" / "matrix.csv"));
    EXPECT_EQ(matrix.size(), 17u);
    EXPECT_NE(read_file(in / "run1" / "matrix.csv").find("motif-wise,eigenvector,error"),
              std::string::npos);
}

TEST(pipeline, missing_input_is_a_data_error) {
    PipelineConfig cfg;
    cfg.records_path = "/nonexistent/records.csv";
    cfg.stations_path = "/nonexistent/stations.csv";
    cfg.output_dir = scratch("missing");
    cfg.strategies = {Strategy::classic, Strategy::motif_based};
    EXPECT_THROW(run_compare(cfg), IoError);
}

// --- command-line front end ---------------------------------------------------

namespace {

int run_cli(const std::string &args) {
    const std::string cmd = std::string(MOBNET_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(cli, compare_on_three_passengers_exits_zero) {
    const auto in = three_passenger_inputs("cli_compare");
    const std::string common = "--records " + (in / "records.csv").string() + " --stations " +
                               (in / "stations.csv").string();
    EXPECT_EQ(run_cli("--out-dir " + (in / "a").string() + " --threads 2 compare " + common +
                      " --strategies classic,classic-undirected,motif-based,motif-wise,"
                      "motif-wise-normalized,debruijn"),
              0);
    EXPECT_EQ(run_cli("--out-dir " + (in / "b").string() + " compare " + common +
                      " --strategies classic,classic-undirected,motif-based,motif-wise,"
                      "motif-wise-normalized,debruijn"),
              0);
    for (const auto &entry : fs::directory_iterator(in / "a"))
        EXPECT_EQ(read_file(entry.path()), read_file(in / "b" / entry.path().filename()));
}

TEST(cli, exit_codes) {
    const auto in = three_passenger_inputs("cli_codes");
    const std::string common = "--records " + (in / "records.csv").string() + " --stations " +
                               (in / "stations.csv").string();
    const std::string out = "--out-dir " + (in / "out").string();
    // configuration errors
    EXPECT_EQ(run_cli(out + " compare " + common + " --strategies classic,motif-wise --measures clustering"), 1);
    EXPECT_EQ(run_cli(out + " compare " + common + " --strategies classic"), 1);
    EXPECT_EQ(run_cli(out + " rank " + common + " --strategy classic --measure bogus"), 1);
    EXPECT_EQ(run_cli("frobnicate"), 1);
    // data errors
    EXPECT_EQ(run_cli(out + " ingest --records /nonexistent.csv --stations " +
                      (in / "stations.csv").string()),
              2);
    write_file(in / "bad.csv", "who,when,from,to\n");
    EXPECT_EQ(run_cli(out + " ingest --records " + (in / "bad.csv").string() + " --stations " +
                      (in / "stations.csv").string()),
              2);
    // solver failure: eigenvector on an acyclic network
    EXPECT_EQ(run_cli(out + " rank " + common + " --strategy motif-wise --measure eigenvector"), 3);
    EXPECT_EQ(run_cli(out + " rank " + common + " --strategy classic --measure pagerank --max-iter 1"), 3);
    // success paths
    EXPECT_EQ(run_cli(out + " ingest " + common), 0);
    EXPECT_EQ(run_cli(out + " motifs " + common), 0);
    EXPECT_EQ(run_cli(out + " build " + common + " --strategy debruijn"), 0);
    EXPECT_EQ(run_cli(out + " rank " + common + " --strategy motif-based --measure currentflow"), 0);
    EXPECT_EQ(run_cli(out + " eval --ranking " + (in / "out" / "ranking_motif-based_currentflow.csv").string() +
                      " --truth " + (in / "stations.csv").string()),
              0);
    EXPECT_TRUE(fs::exists(in / "out" / "trips.csv"));
    EXPECT_TRUE(fs::exists(in / "out" / "rejects.csv"));
    EXPECT_TRUE(fs::exists(in / "out" / "motifs.csv"));
    EXPECT_TRUE(fs::exists(in / "out" / "network_debruijn.csv"));
    EXPECT_TRUE(fs::exists(in / "out" / "report.json"));
    EXPECT_EQ(read_file(in / "out" / "trips.csv"), three_passenger_csv());
}

TEST(cli, synth_is_seeded) {
    const auto dir = scratch("cli_synth");
    auto gen = [&](const std::string &tag, int seed) {
        return run_cli("--seed " + std::to_string(seed) + " synth --set passengers=50 --set stations=10 --out " +
                       (dir / (tag + "_r.csv")).string() + " --truth " + (dir / (tag + "_s.csv")).string());
    };
    ASSERT_EQ(gen("a", 3), 0);
    ASSERT_EQ(gen("b", 3), 0);
    ASSERT_EQ(gen("c", 4), 0);
    EXPECT_EQ(read_file(dir / "a_r.csv"), read_file(dir / "b_r.csv"));
    EXPECT_NE(read_file(dir / "a_r.csv"), read_file(dir / "c_r.csv"));
    EXPECT_EQ(run_cli("synth --set nonsense=1 --out " + (dir / "x.csv").string() + " --truth " +
                      (dir / "y.csv").string()),
              1);
}
