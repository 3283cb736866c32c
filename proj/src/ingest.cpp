#include "gridcast/ingest.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <regex>
#include <sstream>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"

namespace gridcast::ingest {

namespace {

class TimestampParser {
public:
    explicit TimestampParser(std::string format) : format_(std::move(format)) {}

    std::optional<TimePoint> operator()(std::string_view text) {
        if (text.empty()) return std::nullopt;
        std::tm tm{};
        stream_.clear();
        stream_.str(std::string(text));
        stream_ >> std::get_time(&tm, format_.c_str());
        if (stream_.fail()) return std::nullopt;
        stream_ >> std::ws;
        if (!stream_.eof()) return std::nullopt;
        if (tm.tm_sec != 0) return std::nullopt;
        try {
            return TimePoint::make(tm.tm_year + 1900, static_cast<unsigned>(tm.tm_mon + 1),
                                   static_cast<unsigned>(tm.tm_mday), tm.tm_hour, tm.tm_min);
        } catch (const Error&) {
            return std::nullopt;
        }
    }

private:
    std::string format_;
    std::istringstream stream_;
};

std::size_t require_column(const std::vector<std::string_view>& header, const std::string& name,
                           const std::string& source) {
    auto idx = csv::column_index(header, name);
    if (!idx) throw Error(Errc::MissingColumn, "column '" + name + "' not found in " + source);
    return *idx;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    return out;
}

}  // namespace

MeterParse parse_meter_csv(const MeterCsvSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + spec.path.string());
    return parse_meter_csv(in, spec);
}

MeterParse parse_meter_csv(std::istream& in, const MeterCsvSpec& spec) {
    const auto lines = csv::read_lines(in);
    const std::string source = spec.path.empty() ? "meter stream" : spec.path.string();
    if (lines.empty()) throw Error(Errc::EmptyFile, source + " has no header");
    const auto header = csv::split(lines.front());
    const std::size_t ts_col = require_column(header, spec.timestamp_column, source);
    const std::size_t w_col = require_column(header, spec.watts_column, source);

    MeterParse result;
    TimestampParser parse_ts(spec.timestamp_format);
    std::size_t data_rows = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        ++data_rows;
        const auto fields = csv::split(lines[i]);
        auto t = ts_col < fields.size() ? parse_ts(fields[ts_col]) : std::nullopt;
        if (!t) {
            ++result.drops.malformed_timestamp;
            continue;
        }
        auto w = w_col < fields.size() ? csv::parse_double(fields[w_col]) : std::nullopt;
        if (!w) {
            ++result.drops.missing_watts;
            continue;
        }
        if (*w < 0.0 && spec.kind != StreamKind::Grid) {
            ++result.drops.negative_watts;
            continue;
        }
        result.records.push_back({*t, *w});
    }
    if (data_rows == 0) throw Error(Errc::EmptyFile, source + " has no data rows");
    if (2 * result.drops.malformed_timestamp > data_rows)
        throw Error(Errc::MalformedTimestamp,
                    std::to_string(result.drops.malformed_timestamp) + " of " + std::to_string(data_rows) +
                        " timestamps in " + source + " do not match format '" + spec.timestamp_format + "'");

    auto& recs = result.records;
    std::stable_sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    auto last = std::unique(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.t == b.t; });
    result.drops.duplicate_timestamp = static_cast<std::size_t>(recs.end() - last);
    recs.erase(last, recs.end());
    return result;
}

std::vector<WeatherDay> parse_weather_csv(const WeatherCsvSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + spec.path.string());
    return parse_weather_csv(in, spec);
}

std::vector<WeatherDay> parse_weather_csv(std::istream& in, const WeatherCsvSpec& spec) {
    const std::string source = spec.path.empty() ? "weather stream" : spec.path.string();
    std::optional<std::pair<int, unsigned>> month;
    if (spec.month_label) {
        const auto& label = *spec.month_label;
        const auto date = label.size() == 6 ? parse_date(label.substr(0, 4) + "-" + label.substr(4, 2) + "-01")
                                            : std::nullopt;
        if (!date) throw Error(Errc::InvalidArgument, "month label '" + label + "' is not YYYYMM");
        month = {static_cast<int>(date->year()), static_cast<unsigned>(date->month())};
    }

    const auto lines = csv::read_lines(in);
    if (lines.empty()) throw Error(Errc::EmptyFile, source + " has no header");
    const auto header = csv::split(lines.front());
    const std::size_t date_col = require_column(header, spec.date_column, source);
    std::array<std::size_t, kWeatherFields> cols{};
    for (std::size_t f = 0; f < kWeatherFields; ++f) cols[f] = require_column(header, spec.columns[f], source);

    std::vector<WeatherDay> days;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = csv::split(lines[i]);
        const auto date = date_col < fields.size() ? parse_date(fields[date_col]) : std::nullopt;
        if (!date)
            throw Error(Errc::Parse, source + " line " + std::to_string(i + 1) + ": bad date");
        if (month && (static_cast<int>(date->year()) != month->first ||
                      static_cast<unsigned>(date->month()) != month->second))
            throw Error(Errc::Parse, source + " line " + std::to_string(i + 1) + ": date outside month " +
                                         *spec.month_label);
        WeatherDay day{*date, {}};
        for (std::size_t f = 0; f < kWeatherFields; ++f) {
            if (cols[f] >= fields.size()) continue;
            auto v = csv::parse_double(fields[cols[f]]);
            if (v && weather_value_plausible(static_cast<WeatherField>(f), *v)) day.values[f] = *v;
        }
        days.push_back(day);
    }
    if (days.empty()) throw Error(Errc::EmptyFile, source + " has no data rows");

    std::stable_sort(days.begin(), days.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
    days.erase(std::unique(days.begin(), days.end(), [](const auto& a, const auto& b) { return a.date == b.date; }),
               days.end());
    return days;
}

std::vector<WeatherDay> parse_weather_dir(const std::filesystem::path& dir) {
    static const std::regex kMonthFile(R"((\d{6})\.csv)");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && std::regex_match(name, kMonthFile)) files.push_back(entry.path());
    }
    if (files.empty()) throw Error(Errc::EmptyFile, "no YYYYMM.csv files in " + dir.string());
    std::sort(files.begin(), files.end());

    std::vector<WeatherDay> all;
    for (const auto& path : files) {
        WeatherCsvSpec spec;
        spec.path = path;
        spec.month_label = path.stem().string();
        auto days = parse_weather_csv(spec);
        all.insert(all.end(), days.begin(), days.end());
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
    all.erase(std::unique(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.date == b.date; }),
              all.end());
    return all;
}

std::vector<WeatherDay> interpolate_weather(std::span<const WeatherDay> days) {
    std::vector<WeatherDay> out(days.begin(), days.end());
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i - 1].date < out[i].date))
            throw Error(Errc::InvalidArgument, "weather days must be strictly increasing by date");

    for (std::size_t f = 0; f < kWeatherFields; ++f) {
        const std::string name(kWeatherColumns[f]);
        std::vector<std::size_t> present;
        for (std::size_t i = 0; i < out.size(); ++i)
            if (out[i].values[f]) present.push_back(i);
        if (present.empty()) throw Error(Errc::AllMissing, name + " has no observations");
        if (present.front() != 0 || present.back() != out.size() - 1)
            throw Error(Errc::BoundaryMissing, name + " is missing at the start or end of the series");

        for (std::size_t k = 0; k + 1 < present.size(); ++k) {
            const std::size_t lo = present[k], hi = present[k + 1];
            if (hi == lo + 1) continue;
            const double x0 = static_cast<double>(days_since_epoch(out[lo].date));
            const double x1 = static_cast<double>(days_since_epoch(out[hi].date));
            const double y0 = *out[lo].values[f], y1 = *out[hi].values[f];
            for (std::size_t i = lo + 1; i < hi; ++i) {
                const double x = static_cast<double>(days_since_epoch(out[i].date));
                out[i].values[f] = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
    }
    return out;
}

SolarMerge merge_solar(std::span<const MeterRecord> grid, std::span<const MeterRecord> solar) {
    SolarMerge out;
    std::size_t i = 0, j = 0;
    while (i < grid.size() && j < solar.size()) {
        if (grid[i].t < solar[j].t) {
            ++out.grid_only;
            ++i;
        } else if (solar[j].t < grid[i].t) {
            ++out.solar_only;
            ++j;
        } else {
            out.records.push_back({grid[i].t, grid[i].watts + solar[j].watts});
            ++i;
            ++j;
        }
    }
    out.grid_only += grid.size() - i;
    out.solar_only += solar.size() - j;
    if (out.records.empty()) throw Error(Errc::EmptyIntersection, "grid and solar streams share no timestamps");
    return out;
}

FrameBuild build_frame(std::span<const MeterRecord> meter, std::span<const WeatherDay> weather) {
    if (meter.empty()) throw Error(Errc::EmptyInput, "no meter records");
    if (weather.empty()) throw Error(Errc::NoOverlap, "no weather days");
    std::map<Date, const WeatherDay*> by_date;
    for (const auto& d : weather) {
        if (!d.complete()) throw Error(Errc::InvalidArgument, "weather for " + format_date(d.date) + " is incomplete");
        by_date.emplace(d.date, &d);
    }

    FrameBuild out;
    out.frame.rows.reserve(meter.size());
    for (std::size_t i = 0; i < meter.size(); ++i) {
        const auto& rec = meter[i];
        if (i > 0 && !(meter[i - 1].t < rec.t))
            throw Error(Errc::InvalidArgument, "meter records must be strictly increasing in time");
        auto it = by_date.find(rec.t.date());
        if (it == by_date.end()) {
            ++out.dropped_no_weather;
            continue;
        }
        FrameRow row;
        row.t = rec.t;
        row.consumption_w = rec.watts;
        for (std::size_t f = 0; f < kWeatherFields; ++f) row.weather[f] = *it->second->values[f];
        row.time_decimal = time_decimal(rec.t);
        out.frame.rows.push_back(row);
    }
    if (out.frame.empty()) throw Error(Errc::NoOverlap, "meter and weather date ranges do not overlap");
    return out;
}

void write_meter_csv(const std::filesystem::path& path, std::span<const MeterRecord> records) {
    auto out = open_out(path);
    out << "timestamp,watts\n";
    for (const auto& r : records) out << r.t.to_string() << ',' << csv::format_double(r.watts) << '\n';
}

void write_weather_csv(const std::filesystem::path& path, std::span<const WeatherDay> days) {
    auto out = open_out(path);
    out << "date";
    for (auto c : kWeatherColumns) out << ',' << c;
    out << '\n';
    for (const auto& d : days) {
        out << format_date(d.date);
        for (const auto& v : d.values) {
            out << ',';
            if (v) out << csv::format_double(*v);
        }
        out << '\n';
    }
}

void write_frame_csv(std::ostream& out, const MergedFrame& frame) {
    out << "timestamp,consumption_w";
    for (auto c : kWeatherColumns) out << ',' << c;
    out << ",time_decimal\n";
    for (const auto& r : frame.rows) {
        out << r.t.to_string() << ',' << csv::format_double(r.consumption_w);
        for (double w : r.weather) out << ',' << csv::format_double(w);
        out << ',' << csv::format_double(r.time_decimal) << '\n';
    }
}

void write_frame_csv(const std::filesystem::path& path, const MergedFrame& frame) {
    auto out = open_out(path);
    write_frame_csv(out, frame);
}

MergedFrame read_frame_csv(const std::filesystem::path& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw Error(Errc::EmptyFile, path.string() + " has no header");
    const auto header = csv::split(lines.front());
    const std::string source = path.string();
    const std::size_t ts_col = require_column(header, "timestamp", source);
    const std::size_t c_col = require_column(header, "consumption_w", source);
    std::array<std::size_t, kWeatherFields> w_cols{};
    for (std::size_t f = 0; f < kWeatherFields; ++f)
        w_cols[f] = require_column(header, std::string(kWeatherColumns[f]), source);

    MergedFrame frame;
    frame.rows.reserve(lines.size());
    TimestampParser parse_ts("%Y-%m-%d %H:%M");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = csv::split(lines[i]);
        const auto bad = [&](const char* what) {
            return Error(Errc::Parse, source + " line " + std::to_string(i + 1) + ": " + what);
        };
        if (fields.size() < header.size()) throw bad("too few fields");
        FrameRow row;
        auto t = parse_ts(fields[ts_col]);
        if (!t) throw bad("bad timestamp");
        row.t = *t;
        auto c = csv::parse_double(fields[c_col]);
        if (!c) throw bad("bad consumption");
        row.consumption_w = *c;
        for (std::size_t f = 0; f < kWeatherFields; ++f) {
            auto v = csv::parse_double(fields[w_cols[f]]);
            if (!v) throw bad("bad weather value");
            row.weather[f] = *v;
        }
        row.time_decimal = time_decimal(row.t);
        frame.rows.push_back(row);
    }
    if (frame.empty()) throw Error(Errc::EmptyFile, source + " has no data rows");
    return frame;
}

}  // namespace gridcast::ingest
