#include "gridcast/frame.hpp"

#include <algorithm>
#include <cmath>

namespace gridcast {

bool weather_value_plausible(WeatherField field, double value) noexcept {
    if (!std::isfinite(value)) return false;
    switch (field) {
        case WeatherField::Rainfall: return value >= 0.0;
        case WeatherField::Rh9am:
        case WeatherField::Rh3pm: return value >= 0.0 && value <= 100.0;
        case WeatherField::MaxTemp:
        case WeatherField::Temp9am:
        case WeatherField::Temp3pm: return value >= -20.0 && value <= 55.0;
    }
    return false;
}

bool WeatherDay::complete() const noexcept {
    return std::all_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); });
}

std::vector<double> MergedFrame::consumption() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.consumption_w);
    return out;
}

std::vector<double> MergedFrame::weather_column(WeatherField f) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.weather[static_cast<std::size_t>(f)]);
    return out;
}

std::vector<std::string> frame_violations(const MergedFrame& frame) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < frame.rows.size(); ++i) {
        const auto& r = frame.rows[i];
        const std::string where = "row " + std::to_string(i) + " (" + r.t.to_string() + "): ";
        if (i > 0 && !(frame.rows[i - 1].t < r.t)) out.push_back(where + "timestamps not strictly increasing");
        if (!std::isfinite(r.consumption_w)) out.push_back(where + "non-finite consumption");
        for (std::size_t f = 0; f < kWeatherFields; ++f) {
            if (!weather_value_plausible(static_cast<WeatherField>(f), r.weather[f]))
                out.push_back(where + std::string(kWeatherColumns[f]) + " missing or out of range");
        }
        if (r.time_decimal != time_decimal(r.t) || r.time_decimal < 0.0 || r.time_decimal >= 24.0)
            out.push_back(where + "time_decimal inconsistent with timestamp");
    }
    return out;
}

}  // namespace gridcast
