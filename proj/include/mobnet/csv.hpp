#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mobnet::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split(std::string_view line);

/// Reads one line, stripping a trailing '\r'. Returns nullopt at end of stream.
std::optional<std::string> read_line(std::istream &in);

/// Quotes a field only when it needs it.
std::string escape(std::string_view field);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

/// Parses a full string as a finite double; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

} // namespace mobnet::csv
