#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace gridcast {

using Date = std::chrono::year_month_day;

inline constexpr int kSlotMinutes = 5;
inline constexpr int kSlotsPerDay = 24 * 60 / kSlotMinutes;  // 288

/// A naive local wall-clock instant on the 5-minute grid. No timezone or DST
/// handling: meters log wall-clock and records are kept as recorded.
class TimePoint {
public:
    TimePoint() = default;

    /// Throws Error(InvalidArgument) for an invalid date, hour, or a minute
    /// that is not a multiple of 5.
    TimePoint(Date date, int hour, int minute);
    static TimePoint make(int year, unsigned month, unsigned day, int hour, int minute);

    Date date() const noexcept { return date_; }
    int hour() const noexcept { return hour_; }
    int minute() const noexcept { return minute_; }

    /// 0..287 index of this instant within its day.
    int slot() const noexcept { return (hour_ * 60 + minute_) / kSlotMinutes; }
    unsigned month() const noexcept { return static_cast<unsigned>(date_.month()); }

    /// Minutes since 1970-01-01 00:00 on the naive civil timeline.
    long long minutes_since_epoch() const noexcept;
    static TimePoint from_minutes_since_epoch(long long minutes);

    /// "YYYY-MM-DD HH:MM"
    std::string to_string() const;

    auto operator<=>(const TimePoint&) const = default;
    bool operator==(const TimePoint&) const = default;

private:
    Date date_{std::chrono::year{1970}, std::chrono::month{1}, std::chrono::day{1}};
    int hour_ = 0;
    int minute_ = 0;
};

/// Southern-Hemisphere meteorological seasons; DJF is summer.
enum class Season { DJF, MAM, JJA, SON };

inline constexpr Season kAllSeasons[] = {Season::DJF, Season::MAM, Season::JJA, Season::SON};

Season season_of_month(unsigned month);
Season season_of(const TimePoint& t);
std::string_view to_string(Season s) noexcept;
std::optional<Season> season_from_string(std::string_view s) noexcept;

/// Continuous time of day in hours: hour + minute/60, in [0, 24).
double time_decimal(const TimePoint& t) noexcept;

/// "YYYY-MM-DD"
std::string format_date(Date d);
std::optional<Date> parse_date(std::string_view text);
long long days_since_epoch(Date d);
Date date_from_days(long long days);
/// Day of year, 1-based.
int day_of_year(Date d);

}  // namespace gridcast
