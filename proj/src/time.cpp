#include "gridcast/time.hpp"

#include <charconv>
#include <cstdio>

#include "gridcast/error.hpp"

namespace gridcast {

using namespace std::chrono;

TimePoint::TimePoint(Date date, int hour, int minute) : date_(date), hour_(hour), minute_(minute) {
    if (!date.ok()) throw Error(Errc::InvalidArgument, "invalid calendar date");
    if (hour < 0 || hour > 23) throw Error(Errc::InvalidArgument, "hour out of range");
    if (minute < 0 || minute > 59 || minute % kSlotMinutes != 0)
        throw Error(Errc::InvalidArgument, "minute must be a multiple of 5 in [0, 55]");
}

TimePoint TimePoint::make(int y, unsigned m, unsigned d, int hour, int minute) {
    return TimePoint(Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}, hour, minute);
}

long long TimePoint::minutes_since_epoch() const noexcept {
    return days_since_epoch(date_) * 1440 + hour_ * 60 + minute_;
}

TimePoint TimePoint::from_minutes_since_epoch(long long minutes) {
    long long days = minutes / 1440;
    long long rem = minutes % 1440;
    if (rem < 0) {
        rem += 1440;
        --days;
    }
    return TimePoint(date_from_days(days), static_cast<int>(rem / 60), static_cast<int>(rem % 60));
}

std::string TimePoint::to_string() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s %02d:%02d", format_date(date_).c_str(), hour_, minute_);
    return buf;
}

Season season_of_month(unsigned month) {
    switch (month) {
        case 12: case 1: case 2: return Season::DJF;
        case 3: case 4: case 5: return Season::MAM;
        case 6: case 7: case 8: return Season::JJA;
        case 9: case 10: case 11: return Season::SON;
    }
    throw Error(Errc::InvalidArgument, "month out of range");
}

Season season_of(const TimePoint& t) { return season_of_month(t.month()); }

std::string_view to_string(Season s) noexcept {
    switch (s) {
        case Season::DJF: return "DJF";
        case Season::MAM: return "MAM";
        case Season::JJA: return "JJA";
        case Season::SON: return "SON";
    }
    return "?";
}

std::optional<Season> season_from_string(std::string_view s) noexcept {
    for (Season season : kAllSeasons)
        if (to_string(season) == s) return season;
    return std::nullopt;
}

double time_decimal(const TimePoint& t) noexcept { return t.hour() + t.minute() / 60.0; }

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d))
        return std::nullopt;
    if (m < 1 || d < 1) return std::nullopt;
    Date date{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

long long days_since_epoch(Date d) { return sys_days{d}.time_since_epoch().count(); }

Date date_from_days(long long days) { return Date{sys_days{std::chrono::days{days}}}; }

int day_of_year(Date d) {
    Date jan1{d.year(), January, std::chrono::day{1}};
    return static_cast<int>((sys_days{d} - sys_days{jan1}).count()) + 1;
}

}  // namespace gridcast
