#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridcast/frame.hpp"
#include "gridcast/time.hpp"

namespace gridcast::eval {

double rmse(std::span<const double> pred, std::span<const double> actual);
double mae(std::span<const double> pred, std::span<const double> actual);
/// 1 - SS_res / SS_tot. Throws Error(ZeroVariance) on constant actuals and
/// Error(TooFewRows) for fewer than two samples.
double r2(std::span<const double> pred, std::span<const double> actual);
/// Product-moment correlation. Throws Error(ZeroVariance) if either side is constant.
double pearson(std::span<const double> x, std::span<const double> y);

enum class Units { Watts, Scaled };
std::string_view to_string(Units u) noexcept;

struct MetricSet {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> r2;  // absent when undefined (n < 2 or constant actuals)
    std::size_t n = 0;
    Units units = Units::Watts;
};

MetricSet compute_metrics(std::span<const double> pred, std::span<const double> actual, Units units = Units::Watts);

/// Pearson matrix over the six weather columns followed by consumption.
/// Off-diagonal cells involving a constant column are absent; the diagonal is
/// always exactly 1.
struct CorrelationMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<std::optional<double>>> values;
};

CorrelationMatrix correlation_matrix(const MergedFrame& frame);

struct DatedPair {
    TimePoint t;
    double predicted = 0.0;
    double actual = 0.0;
};

/// MetricSet per non-empty Southern-Hemisphere season.
std::map<Season, MetricSet> stratify_by_season(std::span<const DatedPair> pairs, Units units = Units::Watts);

enum class Statistic { Median, Mean };

/// Per season, one value per 5-minute slot of the day (288 slots); slots with
/// no observations are absent. Only seasons present in the frame appear.
using SlotProfile = std::array<std::optional<double>, kSlotsPerDay>;
std::map<Season, SlotProfile> diurnal_profile(const MergedFrame& frame, Statistic stat = Statistic::Median);

}  // namespace gridcast::eval
