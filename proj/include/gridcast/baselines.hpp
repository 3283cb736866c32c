#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridcast/time.hpp"

namespace gridcast::baselines {

/// Persistence lag in 5-minute steps: 1 is naive, 288 is same-slot-yesterday.
struct LagSpec {
    std::size_t lag = 1;

    static constexpr LagSpec naive() noexcept { return {1}; }
    static constexpr LagSpec seasonal() noexcept { return {static_cast<std::size_t>(kSlotsPerDay)}; }
};

struct ForecastPair {
    std::size_t index = 0;  // position of the actual in the series
    double predicted = 0.0;
    double actual = 0.0;
};

/// prediction for index t is series[t - lag], for every t in [lag, N).
/// Exactly N - lag pairs; throws Error(SeriesTooShort) when N <= lag.
std::vector<ForecastPair> persistence_forecast(std::span<const double> series, LagSpec spec);

}  // namespace gridcast::baselines
