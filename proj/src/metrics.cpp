#include "gridcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridcast/error.hpp"

namespace gridcast::eval {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(Errc::LengthMismatch, "prediction and actual lengths differ");
    if (a.empty()) throw Error(Errc::EmptyInput, "metric over zero samples");
}

bool constant(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
}

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median(std::vector<double>& v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - actual[i]) * (pred[i] - actual[i]);
    return std::sqrt(s / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - actual[i]);
    return s / static_cast<double>(pred.size());
}

double r2(std::span<const double> pred, std::span<const double> actual) {
    check_pair(pred, actual);
    if (actual.size() < 2) throw Error(Errc::TooFewRows, "R^2 needs at least two samples");
    if (constant(actual)) throw Error(Errc::ZeroVariance, "R^2 is undefined for constant actuals");
    const double m = mean(actual);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_res += (pred[i] - actual[i]) * (pred[i] - actual[i]);
        ss_tot += (m - actual[i]) * (m - actual[i]);
    }
    return 1.0 - ss_res / ss_tot;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    if (x.size() < 2) throw Error(Errc::TooFewRows, "correlation needs at least two samples");
    if (constant(x) || constant(y)) throw Error(Errc::ZeroVariance, "correlation is undefined for a constant series");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string_view to_string(Units u) noexcept { return u == Units::Watts ? "W" : "scaled"; }

MetricSet compute_metrics(std::span<const double> pred, std::span<const double> actual, Units units) {
    MetricSet m;
    m.rmse = rmse(pred, actual);
    m.mae = mae(pred, actual);
    m.n = pred.size();
    m.units = units;
    if (actual.size() >= 2 && !constant(actual)) m.r2 = r2(pred, actual);
    return m;
}

CorrelationMatrix correlation_matrix(const MergedFrame& frame) {
    if (frame.size() < 2) throw Error(Errc::TooFewRows, "correlation matrix needs at least two rows");
    CorrelationMatrix cm;
    std::vector<std::vector<double>> cols;
    for (std::size_t f = 0; f < kWeatherFields; ++f) {
        cm.names.emplace_back(kWeatherColumns[f]);
        cols.push_back(frame.weather_column(static_cast<WeatherField>(f)));
    }
    cm.names.emplace_back("consumption_w");
    cols.push_back(frame.consumption());

    const std::size_t k = cols.size();
    cm.values.assign(k, std::vector<std::optional<double>>(k));
    for (std::size_t i = 0; i < k; ++i) {
        cm.values[i][i] = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            if (constant(cols[i]) || constant(cols[j])) continue;
            const double r = pearson(cols[i], cols[j]);
            cm.values[i][j] = r;
            cm.values[j][i] = r;
        }
    }
    return cm;
}

std::map<Season, MetricSet> stratify_by_season(std::span<const DatedPair> pairs, Units units) {
    std::map<Season, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& p : pairs) {
        auto& g = groups[season_of(p.t)];
        g.first.push_back(p.predicted);
        g.second.push_back(p.actual);
    }
    std::map<Season, MetricSet> out;
    for (const auto& [season, g] : groups) out.emplace(season, compute_metrics(g.first, g.second, units));
    return out;
}

std::map<Season, SlotProfile> diurnal_profile(const MergedFrame& frame, Statistic stat) {
    std::map<Season, std::array<std::vector<double>, kSlotsPerDay>> buckets;
    for (const auto& r : frame.rows) buckets[season_of(r.t)][static_cast<std::size_t>(r.t.slot())].push_back(r.consumption_w);
    std::map<Season, SlotProfile> out;
    for (auto& [season, slots] : buckets) {
        SlotProfile profile;
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (slots[s].empty()) continue;
            profile[s] = stat == Statistic::Median ? median(slots[s]) : mean(slots[s]);
        }
        out.emplace(season, profile);
    }
    return out;
}

}  // namespace gridcast::eval
