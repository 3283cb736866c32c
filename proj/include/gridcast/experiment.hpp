#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridcast/ingest.hpp"
#include "gridcast/models.hpp"
#include "gridcast/nn/train.hpp"
#include "gridcast/report.hpp"
#include "gridcast/synth.hpp"

namespace gridcast::experiment {

inline constexpr const char* kNaive = "naive";
inline constexpr const char* kSeasonalNaive = "seasonal-naive";
inline constexpr const char* kMlp = "mlp";
inline constexpr const char* kLstm = "lstm";

/// Everything one run needs. Serialised as a flat JSON object of dotted keys;
/// every key is optional and falls back to the defaults below.
struct ExperimentConfig {
    /// "synth", "files" (meter/solar/weather CSVs), or "frame" (merged CSV).
    std::string source = "synth";
    std::filesystem::path meter_csv;
    std::filesystem::path solar_csv;  // empty: no solar stream
    std::filesystem::path weather;    // weather.csv file or directory of YYYYMM.csv
    std::filesystem::path frame_csv;
    synth::SynthConfig synth;
    bool monthly_weather = false;     // synth subcommand output layout

    double split_ratio = 0.8;
    std::size_t window = 24;
    std::vector<std::string> roster = {kNaive, kSeasonalNaive, kMlp, kLstm};
    nn::TrainConfig train;
    double val_fraction = 0.1;

    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "gridcast-out";
    bool scaled_metrics = false;
    bool season_strata = true;
    bool verbose = false;
};

/// Flat, fully defaulted JSON. output_dir is left out: it names where a run
/// is written, not what is run.
nlohmann::json config_to_json(const ExperimentConfig& config);
/// Unknown keys are rejected with Error(InvalidConfig).
ExperimentConfig config_from_json(const nlohmann::json& j);
/// "default" yields the built-in defaults; anything else is a JSON file path.
ExperimentConfig load_config(const std::string& path_or_default);
/// 16 hex digits of FNV-1a over the canonical config JSON.
std::string config_hash(const ExperimentConfig& config);

struct IngestSummary {
    ingest::MeterDrops meter_drops;
    ingest::MeterDrops solar_drops;
    std::size_t solar_grid_only = 0;
    std::size_t solar_solar_only = 0;
    std::size_t weather_days = 0;
    std::size_t dropped_no_weather = 0;
};

/// Builds the merged frame from the configured source.
MergedFrame load_frame(const ExperimentConfig& config, IngestSummary* summary = nullptr);

/// Leakage-free model inputs derived from one frame.
struct PreparedData {
    MergedFrame frame;
    prep::SplitIndex split;
    std::size_t val_boundary = 0;       // training rows [0, val_boundary), validation [val_boundary, split.boundary)
    models::FeatureScalers scalers;     // fitted on [0, split.boundary)
    std::vector<double> scaled_series;  // consumption scaled with scalers.target
    nn::Dataset mlp_train, mlp_val;
    nn::Dataset lstm_train, lstm_val;
    std::vector<std::size_t> eval_rows;  // test rows every model is scored on
    Matrix eval_features;                // raw static features at eval_rows
    prep::WindowBatch eval_windows;      // scaled windows whose targets are eval_rows
};

PreparedData prepare(const MergedFrame& frame, const ExperimentConfig& config);

struct TrainedMlp {
    models::Mlp model;
    nn::TrainHistory history;
};
struct TrainedLstm {
    models::LstmNet model;
    nn::TrainHistory history;
};

TrainedMlp train_mlp(const PreparedData& data, const ExperimentConfig& config);
TrainedLstm train_lstm(const PreparedData& data, const ExperimentConfig& config);

/// Watt predictions aligned with data.eval_rows.
std::vector<double> predict_baseline(const PreparedData& data, const std::string& model);
std::vector<double> predict_mlp(const PreparedData& data, const models::Mlp& model);
std::vector<double> predict_lstm(const PreparedData& data, const models::LstmNet& model);

/// Appends the "test" row and the per-season rows for one model.
void score_model(eval::EvalReport& report, const PreparedData& data, const std::string& model,
                 const std::vector<double>& predictions, const ExperimentConfig& config);

eval::EvalReport make_report_shell(const ExperimentConfig& config);

struct RunResult {
    eval::EvalReport report;
    std::optional<TrainedMlp> mlp;
    std::optional<TrainedLstm> lstm;
};

/// Full roster: load -> prepare -> train -> score. Writes artifacts to
/// config.output_dir when `write_artifacts` is set.
RunResult run_experiment(const ExperimentConfig& config, bool write_artifacts = true);

/// Same, on an already built frame.
RunResult run_on_frame(const MergedFrame& frame, const ExperimentConfig& config, bool write_artifacts);

void write_predictions_csv(const std::filesystem::path& path, const PreparedData& data,
                           const std::vector<double>& predictions);
void write_correlation_csv(const std::filesystem::path& path, const MergedFrame& frame);
void write_diurnal_csv(const std::filesystem::path& path, const MergedFrame& frame);
void write_history_csv(const std::filesystem::path& path, const nn::TrainHistory& history);

/// ISO-8601 UTC wall-clock time, for report metadata.
std::string utc_timestamp();

}  // namespace gridcast::experiment
