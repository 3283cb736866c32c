#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridcast::csv {

/// Splits one unquoted CSV line on commas; trims a trailing CR and surrounding spaces.
std::vector<std::string_view> split(std::string_view line);

/// Reads all lines of a stream, stripping a UTF-8 BOM and CR line endings.
std::vector<std::string> read_lines(std::istream& in);
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Index of `name` in `header`, if present.
std::optional<std::size_t> column_index(const std::vector<std::string_view>& header,
                                        std::string_view name);

/// Strict full-field parse; empty, partial, or non-finite input yields nullopt.
std::optional<double> parse_double(std::string_view text);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace gridcast::csv
