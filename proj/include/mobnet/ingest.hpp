#pragma once

#include <chrono>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mobnet {

enum class StationId : std::uint32_t {};

constexpr std::uint32_t index(StationId s) noexcept { return static_cast<std::uint32_t>(s); }
constexpr StationId station(std::uint32_t i) noexcept { return static_cast<StationId>(i); }

struct Station {
    std::string id;
    std::string name;
    std::optional<double> ground_truth; // absent: excluded from evaluation
};

/// Station ground-truth scores keyed by station id.
using TruthTable = std::map<std::string, double>;

/// The declared set of stations. StationIds are positions in declaration order.
class StationUniverse {
public:
    StationUniverse() = default;

    /// Reads `station_id,name,ground_truth_score`.
    static StationUniverse read_csv(std::istream &in);
    void write_csv(std::ostream &out) const;

    StationId add(Station s);
    std::optional<StationId> find(std::string_view id) const;

    const Station &operator[](StationId s) const { return stations_[index(s)]; }
    const std::string &id(StationId s) const { return stations_[index(s)].id; }
    std::size_t size() const noexcept { return stations_.size(); }
    std::span<const Station> stations() const noexcept { return stations_; }

    /// Stations that carry a ground-truth score.
    TruthTable truth() const;

private:
    std::vector<Station> stations_;
    std::unordered_map<std::string, std::uint32_t> lookup_;
};

/// Wall-clock time in the configured zone.
using LocalTime = std::chrono::local_seconds;

struct ODRecord {
    std::string card_id;
    LocalTime depart_time;
    StationId origin;
    StationId destination;
    std::size_t line_number = 0;
};

enum class RejectReason { missing_field, extra_field, bad_timestamp, unknown_station, self_loop };

std::string_view to_string(RejectReason r);

struct RejectedRow {
    std::size_t line_number;
    RejectReason reason;

    bool operator==(const RejectedRow &) const = default;
};

enum class TimeFormat { auto_detect, iso8601, epoch_seconds };
enum class DayFilter { all, weekdays, weekends };

DayFilter parse_day_filter(std::string_view text);

struct IngestConfig {
    DayFilter day_filter = DayFilter::all;
    /// Added to epoch-second timestamps to obtain local wall-clock time.
    std::chrono::seconds utc_offset{0};
    TimeFormat time_format = TimeFormat::auto_detect;
};

struct ParseResult {
    std::vector<ODRecord> records;
    std::vector<RejectedRow> rejected;
    std::size_t filtered_out = 0; // well-formed rows removed by the day filter
    TimeFormat time_format = TimeFormat::auto_detect;
};

/// Parses `card_id,depart_time,origin,destination` rows. Throws IoError / FormatError.
ParseResult parse_records(std::istream &in, const StationUniverse &universe,
                          const IngestConfig &config = {});

std::optional<LocalTime> parse_iso_timestamp(std::string_view text);
std::string format_iso_timestamp(LocalTime t);

struct Trip {
    StationId origin;
    StationId destination;
    LocalTime depart_time;
};

/// One card's trips on one calendar day, sorted by departure (stable on ties).
struct PassengerDay {
    std::string card_id;
    std::chrono::year_month_day date;
    std::vector<Trip> trips;
};

/// Groups records by (card_id, departure date). Output is sorted by (card_id, date).
std::vector<PassengerDay> partition_by_day(std::span<const ODRecord> records);

void write_records(std::ostream &out, std::span<const ODRecord> records,
                   const StationUniverse &universe);
void write_reject_report(std::ostream &out, std::span<const RejectedRow> rejected);

} // namespace mobnet
