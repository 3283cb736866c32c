#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridcast/frame.hpp"

namespace gridcast::ingest {

/// grid: net draw, may go negative under export. solar: PV output.
/// plain: household consumption with no PV on site.
enum class StreamKind { Grid, Solar, Plain };

struct MeterCsvSpec {
    std::filesystem::path path;
    std::string timestamp_column = "timestamp";
    std::string watts_column = "watts";
    /// std::get_time format.
    std::string timestamp_format = "%Y-%m-%d %H:%M";
    StreamKind kind = StreamKind::Plain;
};

struct MeterDrops {
    std::size_t missing_watts = 0;
    std::size_t malformed_timestamp = 0;
    std::size_t duplicate_timestamp = 0;
    /// Negative readings on a stream that is not net-grid.
    std::size_t negative_watts = 0;

    std::size_t total() const noexcept {
        return missing_watts + malformed_timestamp + duplicate_timestamp + negative_watts;
    }
};

struct MeterParse {
    std::vector<MeterRecord> records;  // sorted, unique timestamps
    MeterDrops drops;
};

MeterParse parse_meter_csv(const MeterCsvSpec& spec);
MeterParse parse_meter_csv(std::istream& in, const MeterCsvSpec& spec);

struct WeatherCsvSpec {
    std::filesystem::path path;
    /// YYYYMM; when set, every row must fall inside that month.
    std::optional<std::string> month_label;
    std::string date_column = "date";
    /// File header for each WeatherField, in WeatherField order.
    std::array<std::string, kWeatherFields> columns = {
        std::string(kWeatherColumns[0]), std::string(kWeatherColumns[1]),
        std::string(kWeatherColumns[2]), std::string(kWeatherColumns[3]),
        std::string(kWeatherColumns[4]), std::string(kWeatherColumns[5])};
};

/// One WeatherDay per distinct date (first occurrence wins), sorted by date.
/// Blank, unparseable, or implausible cells become missing.
std::vector<WeatherDay> parse_weather_csv(const WeatherCsvSpec& spec);
std::vector<WeatherDay> parse_weather_csv(std::istream& in, const WeatherCsvSpec& spec);

/// Parses every YYYYMM.csv file in `dir` and concatenates them in date order.
std::vector<WeatherDay> parse_weather_dir(const std::filesystem::path& dir);

/// Fills interior gaps field by field, linear in calendar-day distance.
std::vector<WeatherDay> interpolate_weather(std::span<const WeatherDay> days);

struct SolarMerge {
    std::vector<MeterRecord> records;
    std::size_t grid_only = 0;
    std::size_t solar_only = 0;
};

/// Inner join on timestamp; total = grid + solar.
SolarMerge merge_solar(std::span<const MeterRecord> grid, std::span<const MeterRecord> solar);

struct FrameBuild {
    MergedFrame frame;
    std::size_t dropped_no_weather = 0;
};

/// Broadcasts each day's weather onto all of that day's meter rows.
FrameBuild build_frame(std::span<const MeterRecord> meter, std::span<const WeatherDay> weather);

void write_meter_csv(const std::filesystem::path& path, std::span<const MeterRecord> records);
void write_weather_csv(const std::filesystem::path& path, std::span<const WeatherDay> days);
void write_frame_csv(const std::filesystem::path& path, const MergedFrame& frame);
void write_frame_csv(std::ostream& out, const MergedFrame& frame);
MergedFrame read_frame_csv(const std::filesystem::path& path);

}  // namespace gridcast::ingest
