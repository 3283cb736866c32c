#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridcast/time.hpp"

namespace gridcast {

/// Net-grid records from a solar household may be negative (export).
struct MeterRecord {
    TimePoint t;
    double watts = 0.0;
};

/// The six daily weather variables kept for modelling, in feature order.
enum class WeatherField : std::size_t { MaxTemp, Rainfall, Temp9am, Rh9am, Temp3pm, Rh3pm };

inline constexpr std::size_t kWeatherFields = 6;

inline constexpr std::array<std::string_view, kWeatherFields> kWeatherColumns = {
    "max_temp_c", "rainfall_mm", "temp_9am_c", "rh_9am_pct", "temp_3pm_c", "rh_3pm_pct"};

/// True when a present value lies in the physically plausible range for the field.
bool weather_value_plausible(WeatherField field, double value) noexcept;

struct WeatherDay {
    Date date;
    std::array<std::optional<double>, kWeatherFields> values;

    std::optional<double>& operator[](WeatherField f) { return values[static_cast<std::size_t>(f)]; }
    const std::optional<double>& operator[](WeatherField f) const {
        return values[static_cast<std::size_t>(f)];
    }
    bool complete() const noexcept;
};

struct FrameRow {
    TimePoint t;
    double consumption_w = 0.0;
    std::array<double, kWeatherFields> weather{};
    double time_decimal = 0.0;
};

/// Aligned 5-minute meter + weather table, strictly increasing in time.
struct MergedFrame {
    std::vector<FrameRow> rows;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }
    std::vector<double> consumption() const;
    std::vector<double> weather_column(WeatherField f) const;
};

/// Lists every violated frame invariant; empty means the frame is valid.
std::vector<std::string> frame_violations(const MergedFrame& frame);

}  // namespace gridcast
