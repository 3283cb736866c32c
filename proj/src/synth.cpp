#include "gridcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "gridcast/error.hpp"
#include "gridcast/ingest.hpp"
#include "gridcast/nn/rng.hpp"

namespace gridcast::synth {

namespace {

enum Stream : std::uint64_t { kWeather = 1, kSpikes = 2, kDrift = 3, kNoise = 4, kCloud = 5 };

/// +1 in mid-January (peak summer), -1 in mid-July.
double summer_phase(Date d) {
    return std::cos(2.0 * std::numbers::pi * (day_of_year(d) - 15) / 365.25);
}

double round_to(double v, double step) { return std::round(v / step) * step; }

double diurnal(const SynthConfig& c, double slot) {
    const auto bump = [&](double center) {
        const double z = (slot - center) / c.peak_width_slots;
        return std::exp(-0.5 * z * z);
    };
    return c.morning_peak_w * bump(c.morning_center_slot) + c.evening_peak_w * bump(c.evening_center_slot);
}

double seasonal(const SynthConfig& c, Date d) { return -c.seasonal_amplitude_w * summer_phase(d); }

double cooling(const SynthConfig& c, const WeatherDay& w) {
    return c.weather_gain_w_per_c * std::max(0.0, *w[WeatherField::MaxTemp] - c.comfort_temp_c);
}

/// Clear-sky arc in [0, 1] scaled by a seasonal elevation factor.
double clear_sky(Date d, double hour) {
    const double phase = summer_phase(d);
    const double day_length = 12.0 + 2.4 * phase;
    const double sunrise = 12.5 - day_length / 2.0;
    const double arc = std::sin(std::numbers::pi * (hour - sunrise) / day_length);
    if (hour <= sunrise || hour >= sunrise + day_length || arc <= 0.0) return 0.0;
    return (0.75 + 0.25 * phase) * arc;
}

}  // namespace

void validate(const SynthConfig& c) {
    const auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, "synth: " + what); };
    if (c.days < 2) fail("days must be at least 2");
    if (!c.start.ok()) fail("invalid start date");
    for (double v : {c.base_load_w, c.morning_peak_w, c.evening_peak_w, c.spike_rate_per_day, c.spike_min_w,
                     c.spike_max_w, c.seasonal_amplitude_w, c.weather_gain_w_per_c, c.noise_std_w, c.drift_std_w,
                     c.solar_capacity_w, c.floor_w})
        if (!(v >= 0.0) || !std::isfinite(v)) fail("amplitudes, rates and std devs must be finite and >= 0");
    if (!(c.peak_width_slots > 0.0)) fail("peak width must be positive");
    if (c.spike_max_w < c.spike_min_w) fail("spike magnitude range is inverted");
    if (c.spike_min_slots == 0 || c.spike_max_slots < c.spike_min_slots) fail("spike duration range is invalid");
    if (!(c.drift_corr >= 0.0 && c.drift_corr < 1.0)) fail("drift correlation must lie in [0, 1)");
    if (!(c.cloud_coupling >= 0.0 && c.cloud_coupling <= 1.0)) fail("cloud coupling must lie in [0, 1]");
    if (!(c.solar_net_fraction >= 0.0 && c.solar_net_fraction <= 1.0)) fail("solar net fraction must lie in [0, 1]");
}

std::vector<WeatherDay> generate_weather(std::uint64_t seed, Date start, std::size_t days) {
    nn::Rng rng = nn::Rng(seed).split(kWeather);
    std::vector<WeatherDay> out;
    out.reserve(days);
    const long long first = days_since_epoch(start);
    double anomaly = 0.0;
    for (std::size_t d = 0; d < days; ++d) {
        const Date date = date_from_days(first + static_cast<long long>(d));
        const double phase = summer_phase(date);
        anomaly = 0.6 * anomaly + rng.normal(0.0, 3.0);
        const bool wet = rng.bernoulli(0.3 - 0.05 * phase);
        const double rain = wet ? round_to(-6.0 * std::log(1.0 - rng.uniform()), 0.1) : 0.0;
        const double tmax = std::clamp(20.0 + 6.0 * phase + anomaly - (wet ? 2.5 : 0.0), -5.0, 46.0);
        const double t9 = std::clamp(tmax - 7.0 + rng.normal(0.0, 1.5), -10.0, 45.0);
        const double t3 = std::clamp(tmax - std::abs(rng.normal(1.0, 1.0)), -10.0, 46.0);
        const double rh9 = std::clamp(80.0 - 1.2 * (t9 - 12.0) + (wet ? 8.0 : 0.0) + rng.normal(0.0, 6.0), 5.0, 100.0);
        const double rh3 = std::clamp(60.0 - 1.5 * (t3 - 18.0) + (wet ? 10.0 : 0.0) + rng.normal(0.0, 8.0), 5.0, 100.0);

        WeatherDay w{date, {}};
        w[WeatherField::MaxTemp] = round_to(tmax, 0.1);
        w[WeatherField::Rainfall] = rain;
        w[WeatherField::Temp9am] = round_to(t9, 0.1);
        w[WeatherField::Rh9am] = std::round(rh9);
        w[WeatherField::Temp3pm] = round_to(t3, 0.1);
        w[WeatherField::Rh3pm] = std::round(rh3);
        out.push_back(w);
    }
    return out;
}

double expected_mean_power(const SynthConfig& c, const WeatherDay& weather, std::size_t /*day*/) {
    double diurnal_mean = 0.0;
    for (int s = 0; s < kSlotsPerDay; ++s) diurnal_mean += diurnal(c, s);
    diurnal_mean /= kSlotsPerDay;
    const double spike_mean = c.spike_rate_per_day * 0.5 * (c.spike_min_w + c.spike_max_w) * 0.5 *
                              static_cast<double>(c.spike_min_slots + c.spike_max_slots) / kSlotsPerDay;
    return c.base_load_w + diurnal_mean + seasonal(c, weather.date) + cooling(c, weather) + spike_mean;
}

SynthData generate(const SynthConfig& config) {
    validate(config);
    const std::size_t n = config.days * kSlotsPerDay;
    const nn::Rng root(config.seed);

    SynthData data;
    data.config = config;
    data.weather = generate_weather(config.seed, config.start, config.days);
    auto& truth = data.truth;
    for (auto* v : {&truth.diurnal, &truth.seasonal, &truth.weather, &truth.spikes, &truth.drift, &truth.noise,
                    &truth.load, &truth.solar, &truth.grid})
        v->assign(n, 0.0);

    nn::Rng spike_rng = root.split(kSpikes);
    for (std::size_t d = 0; d < config.days; ++d) {
        const int events = spike_rng.poisson(config.spike_rate_per_day);
        for (int e = 0; e < events; ++e) {
            const auto start = d * kSlotsPerDay + static_cast<std::size_t>(spike_rng.integer(0, kSlotsPerDay - 1));
            const auto length = static_cast<std::size_t>(spike_rng.integer(
                static_cast<long long>(config.spike_min_slots), static_cast<long long>(config.spike_max_slots)));
            const double magnitude = spike_rng.uniform(config.spike_min_w, config.spike_max_w);
            for (std::size_t k = start; k < std::min(n, start + length); ++k) truth.spikes[k] += magnitude;
        }
    }

    nn::Rng drift_rng = root.split(kDrift);
    nn::Rng noise_rng = root.split(kNoise);
    nn::Rng cloud_rng = root.split(kCloud);
    const double innovation = config.drift_std_w * std::sqrt(1.0 - config.drift_corr * config.drift_corr);
    double drift = drift_rng.normal(0.0, config.drift_std_w);

    data.frame.rows.reserve(n);
    data.meter.reserve(n);
    for (std::size_t d = 0; d < config.days; ++d) {
        const WeatherDay& w = data.weather[d];
        const double season_w = seasonal(config, w.date);
        const double cooling_w = cooling(config, w);
        const double rain = *w[WeatherField::Rainfall];
        const double cloud =
            std::clamp(config.cloud_coupling * std::min(1.0, rain / 10.0) + cloud_rng.uniform(0.0, 0.2), 0.0, 0.95);
        for (int s = 0; s < kSlotsPerDay; ++s) {
            const std::size_t k = d * kSlotsPerDay + static_cast<std::size_t>(s);
            const TimePoint t(w.date, s * kSlotMinutes / 60, s * kSlotMinutes % 60);
            if (k > 0) drift = config.drift_corr * drift + drift_rng.normal(0.0, innovation);

            truth.diurnal[k] = diurnal(config, s);
            truth.seasonal[k] = season_w;
            truth.weather[k] = cooling_w;
            truth.drift[k] = drift;
            truth.noise[k] = noise_rng.normal(0.0, config.noise_std_w);
            truth.load[k] = std::max(config.floor_w, config.base_load_w + truth.diurnal[k] + season_w + cooling_w +
                                                         truth.spikes[k] + drift + truth.noise[k]);

            double total = truth.load[k];
            if (config.solar) {
                truth.solar[k] = config.solar_capacity_w * clear_sky(w.date, time_decimal(t)) * (1.0 - cloud);
                truth.grid[k] = truth.load[k] - config.solar_net_fraction * truth.solar[k];
                total = truth.grid[k] + truth.solar[k];
                data.solar_meter.push_back({t, truth.solar[k]});
            } else {
                truth.grid[k] = truth.load[k];
            }
            data.meter.push_back({t, truth.grid[k]});

            FrameRow row;
            row.t = t;
            row.consumption_w = total;
            for (std::size_t f = 0; f < kWeatherFields; ++f) row.weather[f] = *w.values[f];
            row.time_decimal = time_decimal(t);
            data.frame.rows.push_back(row);
        }
    }
    return data;
}

std::vector<std::filesystem::path> write_csvs(const SynthData& data, const std::filesystem::path& dir,
                                              bool monthly_weather) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    written.push_back(dir / "meter.csv");
    ingest::write_meter_csv(written.back(), data.meter);
    if (data.config.solar) {
        written.push_back(dir / "solar.csv");
        ingest::write_meter_csv(written.back(), data.solar_meter);
    }
    if (!monthly_weather) {
        written.push_back(dir / "weather.csv");
        ingest::write_weather_csv(written.back(), data.weather);
        return written;
    }
    std::map<std::string, std::vector<WeatherDay>> months;
    for (const auto& w : data.weather) months[format_date(w.date).substr(0, 4) + format_date(w.date).substr(5, 2)].push_back(w);
    for (const auto& [label, days] : months) {
        written.push_back(dir / "weather" / (label + ".csv"));
        ingest::write_weather_csv(written.back(), days);
    }
    return written;
}

}  // namespace gridcast::synth
