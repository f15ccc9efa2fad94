#include "mobnet/eval.hpp"

#include "mobnet/csv.hpp"
#include "mobnet/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace mobnet {

namespace {

void sort_and_rank(RankingTable &t) {
    std::sort(t.entries.begin(), t.entries.end(), [](const auto &a, const auto &b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.station_id < b.station_id;
    });
    for (std::size_t i = 0; i < t.entries.size(); ++i)
        t.entries[i].rank = i + 1;
}

double discount(std::size_t position) { return 1.0 / std::log2(static_cast<double>(position) + 1.0); }

double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DataError("correlation undefined: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
            ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

RankingTable make_ranking(std::span<const double> scores, const StationUniverse &universe,
                          std::string provenance) {
    if (scores.size() != universe.size())
        throw ConfigError("make_ranking: score vector does not match station universe");
    RankingTable t{{}, std::move(provenance)};
    t.entries.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        t.entries.push_back({universe.stations()[i].id, scores[i], 0});
    sort_and_rank(t);
    return t;
}

RankingTable make_ranking(const TruthTable &scores, std::string provenance) {
    RankingTable t{{}, std::move(provenance)};
    for (const auto &[id, score] : scores)
        t.entries.push_back({id, score, 0});
    sort_and_rank(t);
    return t;
}

RankingTable restrict_to_truth(const RankingTable &ranking, const TruthTable &truth) {
    RankingTable out{{}, ranking.provenance};
    for (const auto &e : ranking.entries)
        if (truth.contains(e.station_id))
            out.entries.push_back(e);
    for (std::size_t i = 0; i < out.entries.size(); ++i)
        out.entries[i].rank = i + 1;
    return out;
}

std::vector<std::string> excluded_stations(const RankingTable &ranking, const TruthTable &truth) {
    std::vector<std::string> out;
    for (const auto &e : ranking.entries)
        if (!truth.contains(e.station_id))
            out.push_back(e.station_id);
    return out;
}

NdcgMode parse_ndcg_mode(std::string_view text) {
    if (text == "graded")
        return NdcgMode::graded;
    if (text == "binary")
        return NdcgMode::binary;
    throw ConfigError("unknown NDCG mode '" + std::string(text) + "'");
}

std::string_view to_string(NdcgMode m) { return m == NdcgMode::graded ? "graded" : "binary"; }

std::vector<std::size_t> parse_cutoffs(std::string_view text) {
    std::vector<std::size_t> out;
    for (const auto &field : csv::split(text)) {
        const auto f = csv::trim(field);
        if (f == "inf" || f == "all") {
            out.push_back(kAllStations);
            continue;
        }
        std::size_t k = 0;
        auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), k);
        if (ec != std::errc{} || end != f.data() + f.size() || k == 0)
            throw ConfigError("invalid NDCG cutoff '" + std::string(f) + "'");
        out.push_back(k);
    }
    if (out.empty())
        throw ConfigError("no NDCG cutoffs given");
    return out;
}

std::string cutoff_label(std::size_t k) { return k == kAllStations ? "inf" : std::to_string(k); }

double ndcg(const RankingTable &ranking, const TruthTable &truth, std::size_t k, NdcgMode mode) {
    const auto kept = restrict_to_truth(ranking, truth);
    const std::size_t n = kept.entries.size();
    if (n == 0)
        throw DataError("ndcg: ranking and truth share no stations");
    if (k == 0)
        throw ConfigError("ndcg: k must be positive");
    const std::size_t cut = std::min(k, n);

    // Ideal order over the evaluated station set.
    std::vector<std::pair<std::string, double>> ideal;
    for (const auto &e : kept.entries)
        ideal.emplace_back(e.station_id, truth.at(e.station_id));
    std::sort(ideal.begin(), ideal.end(), [](const auto &a, const auto &b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });

    double dcg = 0.0, idcg = 0.0;
    if (mode == NdcgMode::graded) {
        for (std::size_t i = 0; i < cut; ++i) {
            dcg += truth.at(kept.entries[i].station_id) * discount(i + 1);
            idcg += ideal[i].second * discount(i + 1);
        }
    } else {
        std::set<std::string> top;
        for (std::size_t i = 0; i < cut; ++i)
            top.insert(ideal[i].first);
        for (std::size_t i = 0; i < cut; ++i) {
            if (top.contains(kept.entries[i].station_id))
                dcg += discount(i + 1);
            idcg += discount(i + 1);
        }
    }
    if (idcg <= 0.0)
        throw DataError("ndcg: ideal DCG is zero");
    return std::clamp(dcg / idcg, 0.0, 1.0);
}

double pearson_rank_vs_score(const RankingTable &ranking, const TruthTable &truth) {
    const auto kept = restrict_to_truth(ranking, truth);
    if (kept.entries.size() < 3)
        throw DataError("pearson: need at least 3 stations with truth scores");
    std::vector<double> x, y;
    for (const auto &e : kept.entries) {
        x.push_back(static_cast<double>(e.rank));
        y.push_back(truth.at(e.station_id));
    }
    return pearson(x, y);
}

double spearman(const RankingTable &ranking, const TruthTable &truth) {
    const auto kept = restrict_to_truth(ranking, truth);
    if (kept.entries.size() < 3)
        throw DataError("spearman: need at least 3 stations with truth scores");
    std::vector<double> x, y;
    for (const auto &e : kept.entries) {
        x.push_back(e.score);
        y.push_back(truth.at(e.station_id));
    }
    return pearson(average_ranks(x), average_ranks(y));
}

RankingImprovement ranking_improvement(const RankingTable &a, const RankingTable &b,
                                       const RankingTable &truth_ranking) {
    auto ranks = [](const RankingTable &t) {
        std::map<std::string, std::int64_t> r;
        for (const auto &e : t.entries)
            if (!r.emplace(e.station_id, static_cast<std::int64_t>(e.rank)).second)
                throw DataError("ranking_improvement: duplicate station '" + e.station_id + "'");
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b), rt = ranks(truth_ranking);
    auto same_keys = [](const auto &x, const auto &y) {
        return x.size() == y.size() &&
               std::equal(x.begin(), x.end(), y.begin(),
                          [](const auto &p, const auto &q) { return p.first == q.first; });
    };
    if (!same_keys(ra, rb) || !same_keys(ra, rt))
        throw DataError("ranking_improvement: rankings cover different station sets");

    RankingImprovement out;
    for (const auto &[id, rank_a] : ra) {
        const auto rank_b = rb.at(id), rank_t = rt.at(id);
        out.upper += std::abs(rank_a - rank_b);
        out.relative += std::abs(rank_a - rank_t) - std::abs(rank_b - rank_t);
    }
    return out;
}

EvalReport evaluate(const RankingTable &ranking, const TruthTable &truth,
                    std::span<const std::size_t> cutoffs, NdcgMode mode,
                    const RankingTable *baseline) {
    EvalReport report;
    report.provenance = ranking.provenance;
    report.mode = mode;
    report.excluded_stations = excluded_stations(ranking, truth);
    if (restrict_to_truth(ranking, truth).entries.size() >= 3)
        report.pearson_r = pearson_rank_vs_score(ranking, truth);
    for (auto k : cutoffs)
        report.ndcg.emplace_back(k, ndcg(ranking, truth, k, mode));
    if (baseline) {
        const auto rt = make_ranking(truth, "truth");
        report.improvement = ranking_improvement(restrict_to_truth(*baseline, truth),
                                                 restrict_to_truth(ranking, truth),
                                                 restrict_to_truth(rt, truth));
    }
    return report;
}

void write_report_json(std::ostream &out, const EvalReport &report) {
    nlohmann::ordered_json j;
    j["provenance"] = report.provenance;
    j["mode"] = std::string(to_string(report.mode));
    j["pearson_r"] = report.pearson_r ? nlohmann::ordered_json(*report.pearson_r) : nullptr;
    auto ndcg = nlohmann::ordered_json::object();
    for (const auto &[k, v] : report.ndcg)
        ndcg[cutoff_label(k)] = v;
    j["ndcg"] = ndcg;
    if (report.improvement) {
        j["improvement_upper"] = report.improvement->upper;
        j["improvement_relative"] = report.improvement->relative;
    } else {
        j["improvement_upper"] = nullptr;
        j["improvement_relative"] = nullptr;
    }
    j["excluded_stations"] = report.excluded_stations;
    out << j.dump(2) << '\n';
}

void write_ranking_csv(std::ostream &out, const RankingTable &ranking) {
    out << "station_id,score,rank\n";
    for (const auto &e : ranking.entries)
        out << csv::escape(e.station_id) << ',' << csv::format_double(e.score) << ',' << e.rank
            << '\n';
}

RankingTable read_ranking_csv(std::istream &in, std::string provenance) {
    if (!in)
        throw IoError("ranking file is not readable");
    auto header = csv::read_line(in);
    if (!header || csv::trim(*header) != "station_id,score,rank")
        throw FormatError("ranking header must be 'station_id,score,rank'");
    RankingTable t{{}, std::move(provenance)};
    std::size_t line_number = 1;
    while (auto line = csv::read_line(in)) {
        ++line_number;
        if (csv::trim(*line).empty())
            continue;
        auto f = csv::split(*line);
        auto score = f.size() == 3 ? csv::parse_double(f[1]) : std::nullopt;
        if (!score)
            throw FormatError("ranking line " + std::to_string(line_number) + " is malformed");
        t.entries.push_back({std::string(csv::trim(f[0])), *score, 0});
    }
    sort_and_rank(t);
    return t;
}

} // namespace mobnet
