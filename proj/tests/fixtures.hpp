#pragma once

#include "mobnet/ingest.hpp"
#include "mobnet/motif.hpp"

#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mobnet::testing {

/// Stations A..E with ground truth 5,4,3,2,1.
inline StationUniverse letters(std::size_t n = 5) {
    StationUniverse u;
    for (std::size_t i = 0; i < n; ++i)
        u.add({std::string(1, static_cast<char>('A' + i)), "", static_cast<double>(n - i)});
    return u;
}

inline StationId st(char c) { return station(static_cast<std::uint32_t>(c - 'A')); }

inline LocalTime at(int day, int hour, int minute = 0) {
    using namespace std::chrono;
    return local_days{year{2016} / September / day} + hours{hour} + minutes{minute};
}

/// PassengerDay from a string like "AB BA" (one trip per pair), hourly departures.
inline PassengerDay day_of(std::string card, std::string_view trips, int day = 5) {
    PassengerDay d{std::move(card), std::chrono::year{2016} / std::chrono::September / day, {}};
    int hour = 7;
    for (std::size_t i = 0; i + 1 < trips.size(); i += 3)
        d.trips.push_back({st(trips[i]), st(trips[i + 1]), at(day, hour++)});
    return d;
}

/// Three passengers, nine OD pairs over stations A-E.
inline std::vector<PassengerDay> three_passenger_days() {
    return {day_of("c1", "AB BA"), day_of("c2", "AB BC"), day_of("c3", "BC CD DC CE EB")};
}

inline std::string three_passenger_csv() {
    return "card_id,depart_time,origin,destination\n"
           "c1,2016-09-05T08:00:00,A,B\n"
           "c1,2016-09-05T18:00:00,B,A\n"
           "c2,2016-09-05T08:30:00,A,B\n"
           "c2,2016-09-05T12:00:00,B,C\n"
           "c3,2016-09-05T07:00:00,B,C\n"
           "c3,2016-09-05T09:00:00,C,D\n"
           "c3,2016-09-05T11:00:00,D,C\n"
           "c3,2016-09-05T14:00:00,C,E\n"
           "c3,2016-09-05T19:00:00,E,B\n";
}

/// Random passenger days over `stations` stations: 1-6 trips per day, no self-loops,
/// origins usually continuing from the previous destination.
inline std::vector<PassengerDay> random_days(std::size_t count, std::uint32_t stations,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint32_t> pick(0, stations - 1);
    std::uniform_int_distribution<int> len(1, 6);
    std::bernoulli_distribution jump(0.2);
    std::vector<PassengerDay> out;
    for (std::size_t p = 0; p < count; ++p) {
        PassengerDay d{"p" + std::to_string(p), std::chrono::year{2016} / std::chrono::September / 5, {}};
        std::uint32_t here = pick(rng);
        const int trips = len(rng);
        for (int t = 0; t < trips; ++t) {
            if (t > 0 && jump(rng))
                here = pick(rng);
            std::uint32_t to = pick(rng);
            while (to == here)
                to = pick(rng);
            d.trips.push_back({station(here), station(to), at(5, 6 + t)});
            here = to;
        }
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace mobnet::testing
