#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gridcast/frame.hpp"

namespace gridcast::synth {

/// Parameters of the synthetic household. Powers in W, times in 5-minute slots.
struct SynthConfig {
    std::uint64_t seed = 42;
    Date start{std::chrono::year{2023}, std::chrono::month{3}, std::chrono::day{1}};
    std::size_t days = 180;

    double base_load_w = 900.0;
    double morning_peak_w = 600.0;
    double morning_center_slot = 90.0;   // 07:30
    double evening_peak_w = 1300.0;
    double evening_center_slot = 228.0;  // 19:00
    double peak_width_slots = 20.0;      // Gaussian sigma of each peak

    /// Appliance events: Poisson count per day, uniform magnitude and duration.
    double spike_rate_per_day = 1.0;
    double spike_min_w = 1500.0;
    double spike_max_w = 3000.0;
    std::size_t spike_min_slots = 4;
    std::size_t spike_max_slots = 12;

    /// Heating baseline, largest at the July trough of the temperature cycle.
    double seasonal_amplitude_w = 350.0;
    /// Cooling load per degree of daily max temperature above comfort.
    double weather_gain_w_per_c = 60.0;
    double comfort_temp_c = 22.0;

    double noise_std_w = 60.0;
    /// Slow occupancy drift: stationary AR(1) per slot.
    double drift_std_w = 400.0;
    double drift_corr = 0.999;

    bool solar = false;
    double solar_capacity_w = 5000.0;
    /// Cloud factor per mm of rain (saturating at 10 mm), in [0, 1].
    double cloud_coupling = 0.6;
    /// Share of generation netted off behind the grid meter; the rest is
    /// exported on a separate circuit and not seen by the grid stream.
    double solar_net_fraction = 0.3;

    double floor_w = 50.0;
};

/// Throws Error(InvalidConfig) on negative amplitudes, days < 2, etc.
void validate(const SynthConfig& config);

/// Per-row additive components of the generated load (all in W).
struct GroundTruth {
    std::vector<double> diurnal;
    std::vector<double> seasonal;
    std::vector<double> weather;
    std::vector<double> spikes;
    std::vector<double> drift;
    std::vector<double> noise;
    std::vector<double> load;   // floored household load
    std::vector<double> solar;  // PV generation (zero without solar)
    std::vector<double> grid;   // grid meter stream
};

struct SynthData {
    SynthConfig config;
    MergedFrame frame;  // consumption = grid + solar
    GroundTruth truth;
    std::vector<WeatherDay> weather;
    std::vector<MeterRecord> meter;        // grid stream (plain load without solar)
    std::vector<MeterRecord> solar_meter;  // empty without solar
};

SynthData generate(const SynthConfig& config);

/// Expected mean power (W) on day `day` implied by the configured components
/// and the realised weather; ignores the floor and series-end truncation.
double expected_mean_power(const SynthConfig& config, const WeatherDay& weather, std::size_t day);

/// Writes meter.csv (+ solar.csv) and the weather either as weather.csv or
/// as monthly weather/YYYYMM.csv files. Returns the paths written.
std::vector<std::filesystem::path> write_csvs(const SynthData& data, const std::filesystem::path& dir,
                                              bool monthly_weather = false);

/// Synthetic weather only, for `days` days from `start`.
std::vector<WeatherDay> generate_weather(std::uint64_t seed, Date start, std::size_t days);

}  // namespace gridcast::synth
