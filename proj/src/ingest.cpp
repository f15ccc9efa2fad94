#include "mobnet/ingest.hpp"

#include "mobnet/csv.hpp"
#include "mobnet/error.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <charconv>
#include <numeric>
#include <tuple>

namespace mobnet {

namespace {

constexpr std::string_view kRecordHeader = "card_id,depart_time,origin,destination";
constexpr std::string_view kStationHeader = "station_id,name,ground_truth_score";

void strip_bom(std::string &line) {
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);
}

std::string normalized_header(const std::string &line) {
    std::string out;
    for (const auto &field : csv::split(line)) {
        if (!out.empty())
            out.push_back(',');
        out += csv::trim(field);
    }
    return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
    Int value{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        return std::nullopt;
    return value;
}

bool looks_like_epoch(std::string_view text) {
    if (!text.empty() && text.front() == '-')
        text.remove_prefix(1);
    return !text.empty() && std::all_of(text.begin(), text.end(),
                                        [](char c) { return c >= '0' && c <= '9'; });
}

bool is_weekend(std::chrono::local_days day) {
    const std::chrono::weekday wd{day};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

} // namespace

// ---------------------------------------------------------------------------
// StationUniverse

StationUniverse StationUniverse::read_csv(std::istream &in) {
    if (!in)
        throw IoError("station file is not readable");
    auto header = csv::read_line(in);
    if (!header)
        throw FormatError("station file is empty");
    strip_bom(*header);
    if (normalized_header(*header) != kStationHeader)
        throw FormatError("station header must be '" + std::string(kStationHeader) + "'");

    StationUniverse universe;
    std::size_t line_number = 1;
    while (auto line = csv::read_line(in)) {
        ++line_number;
        if (csv::trim(*line).empty())
            continue;
        auto fields = csv::split(*line);
        if (fields.size() != 3)
            throw FormatError("station file line " + std::to_string(line_number) +
                              ": expected 3 fields");
        Station s;
        s.id = std::string(csv::trim(fields[0]));
        s.name = std::string(csv::trim(fields[1]));
        if (s.id.empty())
            throw FormatError("station file line " + std::to_string(line_number) +
                              ": empty station_id");
        const auto score_text = csv::trim(fields[2]);
        if (!score_text.empty()) {
            auto score = csv::parse_double(score_text);
            if (!score || *score < 0.0)
                throw FormatError("station file line " + std::to_string(line_number) +
                                  ": ground_truth_score must be a non-negative number");
            s.ground_truth = *score;
        }
        universe.add(std::move(s));
    }
    if (in.bad())
        throw IoError("error while reading station file");
    return universe;
}

void StationUniverse::write_csv(std::ostream &out) const {
    out << kStationHeader << '\n';
    for (const auto &s : stations_) {
        out << csv::escape(s.id) << ',' << csv::escape(s.name) << ',';
        if (s.ground_truth)
            out << csv::format_double(*s.ground_truth);
        out << '\n';
    }
}

StationId StationUniverse::add(Station s) {
    const auto next = static_cast<std::uint32_t>(stations_.size());
    auto [it, inserted] = lookup_.emplace(s.id, next);
    if (!inserted)
        throw DataError("duplicate station id '" + s.id + "'");
    stations_.push_back(std::move(s));
    return station(next);
}

std::optional<StationId> StationUniverse::find(std::string_view id) const {
    auto it = lookup_.find(std::string(id));
    if (it == lookup_.end())
        return std::nullopt;
    return station(it->second);
}

TruthTable StationUniverse::truth() const {
    TruthTable t;
    for (const auto &s : stations_)
        if (s.ground_truth)
            t.emplace(s.id, *s.ground_truth);
    return t;
}

// ---------------------------------------------------------------------------
// Records

std::string_view to_string(RejectReason r) {
    switch (r) {
    case RejectReason::missing_field: return "missing-field";
    case RejectReason::extra_field: return "extra-field";
    case RejectReason::bad_timestamp: return "bad-timestamp";
    case RejectReason::unknown_station: return "unknown-station";
    case RejectReason::self_loop: return "self-loop";
    }
    return "unknown";
}

DayFilter parse_day_filter(std::string_view text) {
    if (text == "all")
        return DayFilter::all;
    if (text == "weekdays")
        return DayFilter::weekdays;
    if (text == "weekends")
        return DayFilter::weekends;
    throw ConfigError("unknown day filter '" + std::string(text) + "'");
}

std::optional<LocalTime> parse_iso_timestamp(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS (a space separator is accepted as well)
    if (text.size() != 19 || text[4] != '-' || text[7] != '-' ||
        (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':')
        return std::nullopt;
    auto y = parse_int<int>(text.substr(0, 4));
    auto mo = parse_int<unsigned>(text.substr(5, 2));
    auto d = parse_int<unsigned>(text.substr(8, 2));
    auto h = parse_int<int>(text.substr(11, 2));
    auto mi = parse_int<int>(text.substr(14, 2));
    auto s = parse_int<int>(text.substr(17, 2));
    if (!y || !mo || !d || !h || !mi || !s)
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*mo},
                                          std::chrono::day{*d}};
    if (!ymd.ok() || *h < 0 || *h > 23 || *mi < 0 || *mi > 59 || *s < 0 || *s > 59)
        return std::nullopt;
    return std::chrono::local_days{ymd} + std::chrono::hours{*h} + std::chrono::minutes{*mi} +
           std::chrono::seconds{*s};
}

std::string format_iso_timestamp(LocalTime t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

ParseResult parse_records(std::istream &in, const StationUniverse &universe,
                          const IngestConfig &config) {
    if (!in)
        throw IoError("record stream is not readable");
    auto header = csv::read_line(in);
    if (!header)
        throw FormatError("record stream is empty; expected header '" +
                          std::string(kRecordHeader) + "'");
    strip_bom(*header);
    if (normalized_header(*header) != kRecordHeader)
        throw FormatError("record header must be '" + std::string(kRecordHeader) + "'");

    ParseResult result;
    result.time_format = config.time_format;
    std::size_t line_number = 1;
    while (auto line = csv::read_line(in)) {
        ++line_number;
        auto reject = [&](RejectReason r) { result.rejected.push_back({line_number, r}); };

        auto fields = csv::split(*line);
        if (fields.size() < 4) {
            reject(RejectReason::missing_field);
            continue;
        }
        if (fields.size() > 4) {
            reject(RejectReason::extra_field);
            continue;
        }
        std::array<std::string_view, 4> f;
        for (std::size_t i = 0; i < 4; ++i)
            f[i] = csv::trim(fields[i]);
        if (std::any_of(f.begin(), f.end(), [](auto v) { return v.empty(); })) {
            reject(RejectReason::missing_field);
            continue;
        }

        if (result.time_format == TimeFormat::auto_detect)
            result.time_format =
                looks_like_epoch(f[1]) ? TimeFormat::epoch_seconds : TimeFormat::iso8601;
        std::optional<LocalTime> when;
        if (result.time_format == TimeFormat::epoch_seconds) {
            if (auto secs = looks_like_epoch(f[1]) ? parse_int<std::int64_t>(f[1]) : std::nullopt)
                when = LocalTime{std::chrono::seconds{*secs} + config.utc_offset};
        } else {
            when = parse_iso_timestamp(f[1]);
        }
        if (!when) {
            reject(RejectReason::bad_timestamp);
            continue;
        }

        auto origin = universe.find(f[2]);
        auto destination = universe.find(f[3]);
        if (!origin || !destination) {
            reject(RejectReason::unknown_station);
            continue;
        }
        if (*origin == *destination) {
            reject(RejectReason::self_loop);
            continue;
        }

        if (config.day_filter != DayFilter::all) {
            const bool weekend = is_weekend(std::chrono::floor<std::chrono::days>(*when));
            if (weekend != (config.day_filter == DayFilter::weekends)) {
                ++result.filtered_out;
                continue;
            }
        }
        result.records.push_back({std::string(f[0]), *when, *origin, *destination, line_number});
    }
    if (in.bad())
        throw IoError("error while reading record stream");
    return result;
}

std::vector<PassengerDay> partition_by_day(std::span<const ODRecord> records) {
    using std::chrono::days;
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto key = [&](std::size_t i) {
        const auto &r = records[i];
        return std::tie(r.card_id, r.depart_time);
    };
    // stable: equal departure times keep input order
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

    std::vector<PassengerDay> out;
    for (std::size_t i : order) {
        const auto &r = records[i];
        const std::chrono::year_month_day date{std::chrono::floor<days>(r.depart_time)};
        if (out.empty() || out.back().card_id != r.card_id || out.back().date != date)
            out.push_back({r.card_id, date, {}});
        out.back().trips.push_back({r.origin, r.destination, r.depart_time});
    }
    return out;
}

void write_records(std::ostream &out, std::span<const ODRecord> records,
                   const StationUniverse &universe) {
    out << kRecordHeader << '\n';
    for (const auto &r : records)
        out << csv::escape(r.card_id) << ',' << format_iso_timestamp(r.depart_time) << ','
            << csv::escape(universe.id(r.origin)) << ','
            << csv::escape(universe.id(r.destination)) << '\n';
}

void write_reject_report(std::ostream &out, std::span<const RejectedRow> rejected) {
    out << "line_number,reason\n";
    for (const auto &r : rejected)
        out << r.line_number << ',' << to_string(r.reason) << '\n';
}

} // namespace mobnet
