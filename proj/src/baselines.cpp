#include "gridcast/baselines.hpp"

#include "gridcast/error.hpp"

namespace gridcast::baselines {

std::vector<ForecastPair> persistence_forecast(std::span<const double> series, LagSpec spec) {
    if (spec.lag == 0) throw Error(Errc::InvalidArgument, "persistence lag must be at least 1");
    if (series.size() <= spec.lag)
        throw Error(Errc::SeriesTooShort, "series of " + std::to_string(series.size()) +
                                              " values is too short for lag " + std::to_string(spec.lag));
    std::vector<ForecastPair> out;
    out.reserve(series.size() - spec.lag);
    for (std::size_t t = spec.lag; t < series.size(); ++t) out.push_back({t, series[t - spec.lag], series[t]});
    return out;
}

}  // namespace gridcast::baselines
