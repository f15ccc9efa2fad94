#pragma once

#include "mobnet/ingest.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mobnet {

enum class MotifTemplate { single_trip, return_pair, chain_3, chain_4, star_3 };

MotifTemplate parse_template(std::string_view name);
std::string_view to_string(MotifTemplate t);

/// Visited stations of a template, home included.
std::size_t template_node_count(MotifTemplate t);

/// Trip sequence over slots: 0 is home, 1.. are destinations in sampling order.
///   single-trip  0>1
///   return-pair  0>1 1>0
///   chain-3      0>1 1>2 2>0
///   chain-4      0>1 1>2 2>3 3>0
///   star-3       0>1 1>0 0>2 2>0
std::vector<std::pair<std::size_t, std::size_t>> template_trips(MotifTemplate t);

struct SynthConfig {
    std::size_t station_count = 50;
    std::size_t passenger_count = 1000;
    std::size_t days = 5;
    std::uint64_t seed = 1;
    std::vector<double> importance;  // planted truth, one per station, > 0
    std::vector<double> home_weight; // home sampling weight, one per station, > 0
    std::map<MotifTemplate, double> template_mix;
    std::chrono::year_month_day start_date{std::chrono::year{2016}, std::chrono::September,
                                           std::chrono::day{5}};

    void validate() const;
};

struct SynthCorpus {
    StationUniverse stations; // ground truth = planted importance
    std::vector<ODRecord> records; // sorted by (card_id, depart_time)
};

SynthCorpus generate(const SynthConfig &cfg);

/// exp(sigma * z) with z standard normal, drawn from its own stream of `seed`.
std::vector<double> lognormal_importance(std::size_t n, double sigma, std::uint64_t seed);

/// Builds a config from `key=value` settings:
///   stations, passengers, days, seed, start (YYYY-MM-DD),
///   importance = lognormal | uniform, sigma,
///   home = uniform | anti | same,
///   mix = return-pair:0.5,chain-3:0.2,...
SynthConfig synth_config_from(const std::map<std::string, std::string> &settings);

} // namespace mobnet
