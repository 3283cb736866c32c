#include "gridcast/experiment.hpp"

#include <ctime>
#include <fstream>
#include <iostream>
#include <map>

#include "gridcast/baselines.hpp"
#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"

namespace gridcast::experiment {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Field {
    std::function<json(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const json&)> set;
};

template <class T>
Field member(T ExperimentConfig::*m) {
    return {[m](const ExperimentConfig& c) { return json(c.*m); },
            [m](ExperimentConfig& c, const json& v) { c.*m = v.get<T>(); }};
}

Field path_member(fs::path ExperimentConfig::*m) {
    return {[m](const ExperimentConfig& c) { return json((c.*m).string()); },
            [m](ExperimentConfig& c, const json& v) { c.*m = v.get<std::string>(); }};
}

template <class T>
Field synth_member(T synth::SynthConfig::*m) {
    return {[m](const ExperimentConfig& c) { return json(c.synth.*m); },
            [m](ExperimentConfig& c, const json& v) { c.synth.*m = v.get<T>(); }};
}

template <class T>
Field train_member(T nn::TrainConfig::*m) {
    return {[m](const ExperimentConfig& c) { return json(c.train.*m); },
            [m](ExperimentConfig& c, const json& v) { c.train.*m = v.get<T>(); }};
}

std::string join_roster(const std::vector<std::string>& roster) {
    std::string out;
    for (const auto& m : roster) out += (out.empty() ? "" : ",") + m;
    return out;
}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"data.source", member(&ExperimentConfig::source)},
        {"data.meter_csv", path_member(&ExperimentConfig::meter_csv)},
        {"data.solar_csv", path_member(&ExperimentConfig::solar_csv)},
        {"data.weather", path_member(&ExperimentConfig::weather)},
        {"data.frame_csv", path_member(&ExperimentConfig::frame_csv)},
        {"synth.start",
         {[](const ExperimentConfig& c) { return json(format_date(c.synth.start)); },
          [](ExperimentConfig& c, const json& v) {
              auto d = parse_date(v.get<std::string>());
              if (!d) throw Error(Errc::InvalidConfig, "synth.start must be YYYY-MM-DD");
              c.synth.start = *d;
          }}},
        {"synth.days", synth_member(&synth::SynthConfig::days)},
        {"synth.base_load_w", synth_member(&synth::SynthConfig::base_load_w)},
        {"synth.morning_peak_w", synth_member(&synth::SynthConfig::morning_peak_w)},
        {"synth.morning_center_slot", synth_member(&synth::SynthConfig::morning_center_slot)},
        {"synth.evening_peak_w", synth_member(&synth::SynthConfig::evening_peak_w)},
        {"synth.evening_center_slot", synth_member(&synth::SynthConfig::evening_center_slot)},
        {"synth.peak_width_slots", synth_member(&synth::SynthConfig::peak_width_slots)},
        {"synth.spike_rate_per_day", synth_member(&synth::SynthConfig::spike_rate_per_day)},
        {"synth.spike_min_w", synth_member(&synth::SynthConfig::spike_min_w)},
        {"synth.spike_max_w", synth_member(&synth::SynthConfig::spike_max_w)},
        {"synth.spike_min_slots", synth_member(&synth::SynthConfig::spike_min_slots)},
        {"synth.spike_max_slots", synth_member(&synth::SynthConfig::spike_max_slots)},
        {"synth.seasonal_amplitude_w", synth_member(&synth::SynthConfig::seasonal_amplitude_w)},
        {"synth.weather_gain_w_per_c", synth_member(&synth::SynthConfig::weather_gain_w_per_c)},
        {"synth.comfort_temp_c", synth_member(&synth::SynthConfig::comfort_temp_c)},
        {"synth.noise_std_w", synth_member(&synth::SynthConfig::noise_std_w)},
        {"synth.drift_std_w", synth_member(&synth::SynthConfig::drift_std_w)},
        {"synth.drift_corr", synth_member(&synth::SynthConfig::drift_corr)},
        {"synth.solar", synth_member(&synth::SynthConfig::solar)},
        {"synth.solar_capacity_w", synth_member(&synth::SynthConfig::solar_capacity_w)},
        {"synth.cloud_coupling", synth_member(&synth::SynthConfig::cloud_coupling)},
        {"synth.solar_net_fraction", synth_member(&synth::SynthConfig::solar_net_fraction)},
        {"synth.floor_w", synth_member(&synth::SynthConfig::floor_w)},
        {"synth.monthly_weather", member(&ExperimentConfig::monthly_weather)},
        {"split_ratio", member(&ExperimentConfig::split_ratio)},
        {"window", member(&ExperimentConfig::window)},
        {"roster",
         {[](const ExperimentConfig& c) { return json(join_roster(c.roster)); },
          [](ExperimentConfig& c, const json& v) {
              c.roster.clear();
              const auto text = v.get<std::string>();
              for (auto name : csv::split(text))
                  if (!name.empty()) c.roster.emplace_back(name);
          }}},
        {"train.batch_size", train_member(&nn::TrainConfig::batch_size)},
        {"train.max_epochs", train_member(&nn::TrainConfig::max_epochs)},
        {"train.patience", train_member(&nn::TrainConfig::patience)},
        {"train.learning_rate",
         {[](const ExperimentConfig& c) { return json(c.train.adam.learning_rate); },
          [](ExperimentConfig& c, const json& v) { c.train.adam.learning_rate = v.get<double>(); }}},
        {"train.beta1",
         {[](const ExperimentConfig& c) { return json(c.train.adam.beta1); },
          [](ExperimentConfig& c, const json& v) { c.train.adam.beta1 = v.get<double>(); }}},
        {"train.beta2",
         {[](const ExperimentConfig& c) { return json(c.train.adam.beta2); },
          [](ExperimentConfig& c, const json& v) { c.train.adam.beta2 = v.get<double>(); }}},
        {"train.epsilon",
         {[](const ExperimentConfig& c) { return json(c.train.adam.epsilon); },
          [](ExperimentConfig& c, const json& v) { c.train.adam.epsilon = v.get<double>(); }}},
        {"train.val_fraction", member(&ExperimentConfig::val_fraction)},
        {"train.exec",
         {[](const ExperimentConfig& c) { return json(std::string(nn::to_string(c.train.exec))); },
          [](ExperimentConfig& c, const json& v) {
              const auto s = v.get<std::string>();
              if (s != "serial" && s != "parallel")
                  throw Error(Errc::InvalidConfig, "train.exec must be serial or parallel");
              c.train.exec = s == "serial" ? nn::Exec::Serial : nn::Exec::Parallel;
          }}},
        {"seed", member(&ExperimentConfig::seed)},
        {"report.scaled_metrics", member(&ExperimentConfig::scaled_metrics)},
        {"report.season_strata", member(&ExperimentConfig::season_strata)},
        {"verbose", member(&ExperimentConfig::verbose)},
    };
    return table;
}

void validate(const ExperimentConfig& c) {
    const auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
    if (c.source != "synth" && c.source != "files" && c.source != "frame")
        fail("data.source must be synth, files or frame");
    if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) fail("split_ratio must lie in (0, 1)");
    if (c.window == 0) fail("window must be positive");
    if (!(c.val_fraction > 0.0 && c.val_fraction < 1.0)) fail("train.val_fraction must lie in (0, 1)");
    if (c.train.batch_size == 0 || c.train.max_epochs == 0) fail("batch size and max epochs must be positive");
    if (c.roster.empty()) fail("roster is empty");
    for (const auto& m : c.roster)
        if (m != kNaive && m != kSeasonalNaive && m != kMlp && m != kLstm) fail("unknown roster model '" + m + "'");
    synth::validate(c.synth);
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    return out;
}

nn::Rng model_rng(const ExperimentConfig& c, std::uint64_t purpose) { return nn::Rng(c.seed).split(purpose); }

enum Purpose : std::uint64_t { kMlpInit = 101, kMlpTrain = 102, kLstmInit = 201, kLstmTrain = 202 };

nn::EpochCallback progress(const ExperimentConfig& c, const std::string& model) {
    if (!c.verbose) return {};
    return [model](const nn::EpochLog& log) {
        std::cerr << model << " epoch " << log.epoch << " train " << log.train_loss << " val " << log.val_loss << '\n';
    };
}

}  // namespace

json config_to_json(const ExperimentConfig& config) {
    json j = json::object();
    for (const auto& [key, field] : fields()) j[key] = field.get(config);
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be a flat JSON object");
    ExperimentConfig c;
    std::map<std::string, const Field*> lookup;
    for (const auto& [key, field] : fields()) lookup[key] = &field;
    for (const auto& [key, value] : j.items()) {
        if (key == "output_dir") {
            c.output_dir = value.get<std::string>();
            continue;
        }
        auto it = lookup.find(key);
        if (it == lookup.end()) throw Error(Errc::InvalidConfig, "unknown config key '" + key + "'");
        try {
            it->second->set(c, value);
        } catch (const json::exception& e) {
            throw Error(Errc::InvalidConfig, "bad value for '" + key + "': " + e.what());
        }
    }
    c.synth.seed = c.seed;
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path_or_default) {
    if (path_or_default.empty() || path_or_default == "default") return config_from_json(json::object());
    std::ifstream in(path_or_default, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open config " + path_or_default);
    try {
        return config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(Errc::InvalidConfig, path_or_default + ": " + e.what());
    }
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

MergedFrame load_frame(const ExperimentConfig& config, IngestSummary* summary) {
    IngestSummary local;
    IngestSummary& s = summary ? *summary : local;
    if (config.source == "synth") {
        auto cfg = config.synth;
        cfg.seed = config.seed;
        auto data = synth::generate(cfg);
        s.weather_days = data.weather.size();
        return std::move(data.frame);
    }
    if (config.source == "frame") return ingest::read_frame_csv(config.frame_csv);

    const bool has_solar = !config.solar_csv.empty();
    ingest::MeterCsvSpec meter_spec;
    meter_spec.path = config.meter_csv;
    meter_spec.kind = has_solar ? ingest::StreamKind::Grid : ingest::StreamKind::Plain;
    auto meter = ingest::parse_meter_csv(meter_spec);
    s.meter_drops = meter.drops;
    std::vector<MeterRecord> records = std::move(meter.records);
    if (has_solar) {
        ingest::MeterCsvSpec solar_spec;
        solar_spec.path = config.solar_csv;
        solar_spec.kind = ingest::StreamKind::Solar;
        auto solar = ingest::parse_meter_csv(solar_spec);
        s.solar_drops = solar.drops;
        auto merged = ingest::merge_solar(records, solar.records);
        s.solar_grid_only = merged.grid_only;
        s.solar_solar_only = merged.solar_only;
        records = std::move(merged.records);
    }
    std::vector<WeatherDay> weather;
    if (fs::is_directory(config.weather)) {
        weather = ingest::parse_weather_dir(config.weather);
    } else {
        ingest::WeatherCsvSpec spec;
        spec.path = config.weather;
        weather = ingest::parse_weather_csv(spec);
    }
    weather = ingest::interpolate_weather(weather);
    s.weather_days = weather.size();
    auto built = ingest::build_frame(records, weather);
    s.dropped_no_weather = built.dropped_no_weather;
    return std::move(built.frame);
}

PreparedData prepare(const MergedFrame& frame, const ExperimentConfig& config) {
    PreparedData d;
    d.frame = frame;
    const std::size_t n = frame.size();
    const std::size_t L = config.window;
    d.split = prep::chronological_split(n, config.split_ratio);
    const std::size_t b = d.split.boundary;
    const auto val_rows = static_cast<std::size_t>(std::floor(config.val_fraction * static_cast<double>(b)));
    d.val_boundary = b - val_rows;
    if (d.val_boundary <= L || val_rows <= L || n - b <= L)
        throw Error(Errc::SeriesTooShort, "train, validation and test slices must each exceed the window length");

    const auto all = prep::make_features(frame);
    const std::vector<double> consumption = frame.consumption();
    {
        Matrix train_x(b, prep::kStaticFeatures,
                       std::vector<double>(all.x.flat().begin(),
                                           all.x.flat().begin() + static_cast<std::ptrdiff_t>(b * prep::kStaticFeatures)));
        d.scalers.features = prep::fit_scaler(train_x, prep::static_feature_names());
        d.scalers.target = prep::fit_scaler(std::span<const double>(consumption).first(b), "consumption_w");
    }
    const Matrix scaled_x = prep::transform(all.x, d.scalers.features);
    d.scaled_series = prep::transform(consumption, d.scalers.target);

    const auto slice_rows = [&](std::size_t begin, std::size_t end) {
        nn::Dataset ds;
        ds.x = Matrix(end - begin, prep::kStaticFeatures);
        for (std::size_t r = begin; r < end; ++r) {
            const auto src = scaled_x.row(r);
            std::copy(src.begin(), src.end(), ds.x.row(r - begin).begin());
        }
        ds.y.assign(d.scaled_series.begin() + static_cast<std::ptrdiff_t>(begin),
                    d.scaled_series.begin() + static_cast<std::ptrdiff_t>(end));
        return ds;
    };
    d.mlp_train = slice_rows(0, d.val_boundary);
    d.mlp_val = slice_rows(d.val_boundary, b);

    const std::span<const double> series(d.scaled_series);
    auto train_w = prep::make_windows(series.first(d.val_boundary), L, 0);
    auto val_w = prep::make_windows(series.subspan(d.val_boundary, b - d.val_boundary), L, d.val_boundary);
    d.lstm_train = {std::move(train_w.inputs), std::move(train_w.targets)};
    d.lstm_val = {std::move(val_w.inputs), std::move(val_w.targets)};

    d.eval_windows = prep::make_windows(series.subspan(b), L, b);
    d.eval_rows = d.eval_windows.target_row;
    d.eval_features = prep::make_features(frame, b + L, n).x;
    return d;
}

TrainedMlp train_mlp(const PreparedData& data, const ExperimentConfig& config) {
    auto init = model_rng(config, kMlpInit);
    auto rng = model_rng(config, kMlpTrain);
    TrainedMlp t{models::Mlp(models::MlpSpec{}, init), {}};
    t.history = nn::train(t.model, data.mlp_train, data.mlp_val, config.train, rng, progress(config, kMlp));
    return t;
}

TrainedLstm train_lstm(const PreparedData& data, const ExperimentConfig& config) {
    auto init = model_rng(config, kLstmInit);
    auto rng = model_rng(config, kLstmTrain);
    models::LstmSpec spec;
    spec.window = config.window;
    TrainedLstm t{models::LstmNet(spec, init), {}};
    t.history = nn::train(t.model, data.lstm_train, data.lstm_val, config.train, rng, progress(config, kLstm));
    return t;
}

std::vector<double> predict_baseline(const PreparedData& data, const std::string& model) {
    const auto spec = model == kNaive ? baselines::LagSpec::naive() : baselines::LagSpec::seasonal();
    const auto series = data.frame.consumption();
    const auto pairs = baselines::persistence_forecast(series, spec);
    std::vector<double> out;
    out.reserve(data.eval_rows.size());
    for (std::size_t row : data.eval_rows) {
        if (row < spec.lag)
            throw Error(Errc::SeriesTooShort, model + " has no history for test row " + std::to_string(row));
        out.push_back(pairs[row - spec.lag].predicted);
    }
    return out;
}

std::vector<double> predict_mlp(const PreparedData& data, const models::Mlp& model) {
    return models::mlp_predict(model, data.eval_features, data.scalers);
}

std::vector<double> predict_lstm(const PreparedData& data, const models::LstmNet& model) {
    return models::lstm_predict(model, data.eval_windows, data.scalers.target);
}

void score_model(eval::EvalReport& report, const PreparedData& data, const std::string& model,
                 const std::vector<double>& predictions, const ExperimentConfig& config) {
    std::vector<double> actual;
    actual.reserve(data.eval_rows.size());
    for (std::size_t row : data.eval_rows) actual.push_back(data.frame.rows[row].consumption_w);
    report.rows.push_back({model, "test", eval::compute_metrics(predictions, actual)});
    if (config.scaled_metrics) {
        report.rows.push_back({model, "test:scaled",
                               eval::compute_metrics(prep::transform(predictions, data.scalers.target),
                                                     prep::transform(actual, data.scalers.target),
                                                     eval::Units::Scaled)});
    }
    if (config.season_strata) {
        std::vector<eval::DatedPair> pairs;
        pairs.reserve(actual.size());
        for (std::size_t i = 0; i < actual.size(); ++i)
            pairs.push_back({data.frame.rows[data.eval_rows[i]].t, predictions[i], actual[i]});
        for (const auto& [season, metrics] : eval::stratify_by_season(pairs))
            report.rows.push_back({model, "test/" + std::string(to_string(season)), metrics});
    }
}

eval::EvalReport make_report_shell(const ExperimentConfig& config) {
    eval::EvalReport report;
    report.config = config_to_json(config);
    report.config_hash = config_hash(config);
    report.seed = config.seed;
    report.generated_at = utc_timestamp();
    return report;
}

RunResult run_on_frame(const MergedFrame& frame, const ExperimentConfig& config, bool write_artifacts) {
    const PreparedData data = prepare(frame, config);
    RunResult result;
    result.report = make_report_shell(config);
    const fs::path out = config.output_dir;

    for (const auto& model : config.roster) {
        std::vector<double> predictions;
        if (model == kNaive || model == kSeasonalNaive) {
            predictions = predict_baseline(data, model);
        } else if (model == kMlp) {
            result.mlp = train_mlp(data, config);
            predictions = predict_mlp(data, result.mlp->model);
            const auto& h = result.mlp->history;
            result.report.training.push_back(
                {model, result.mlp->model.param_count(), h.epochs.size(), h.best_epoch, h.best_val_loss});
            if (write_artifacts) {
                nn::write_model_file(out / "models" / "mlp.model", result.mlp->model.to_file(config.seed));
                write_history_csv(out / "models" / "mlp_history.csv", h);
            }
        } else {
            result.lstm = train_lstm(data, config);
            predictions = predict_lstm(data, result.lstm->model);
            const auto& h = result.lstm->history;
            result.report.training.push_back(
                {model, result.lstm->model.param_count(), h.epochs.size(), h.best_epoch, h.best_val_loss});
            if (write_artifacts) {
                nn::write_model_file(out / "models" / "lstm.model", result.lstm->model.to_file(config.seed));
                write_history_csv(out / "models" / "lstm_history.csv", h);
            }
        }
        score_model(result.report, data, model, predictions, config);
        if (write_artifacts) write_predictions_csv(out / "predictions" / (model + ".csv"), data, predictions);
    }

    if (write_artifacts) {
        fs::create_directories(out / "models");
        prep::save_scaler(out / "models" / "scaler_features.json", data.scalers.features);
        prep::save_scaler(out / "models" / "scaler_target.json", data.scalers.target);
        auto cfg_out = open_out(out / "config.json");
        cfg_out << config_to_json(config).dump(2) << '\n';
        eval::write_report_json(out / "report.json", result.report);
        eval::write_report_csv(out / "report.csv", result.report);
        write_correlation_csv(out / "analysis" / "correlation.csv", frame);
        write_diurnal_csv(out / "analysis" / "diurnal_profile.csv", frame);
    }
    return result;
}

RunResult run_experiment(const ExperimentConfig& config, bool write_artifacts) {
    return run_on_frame(load_frame(config), config, write_artifacts);
}

void write_predictions_csv(const fs::path& path, const PreparedData& data, const std::vector<double>& predictions) {
    auto out = open_out(path);
    out << "timestamp,actual,predicted\n";
    for (std::size_t i = 0; i < data.eval_rows.size(); ++i) {
        const auto& row = data.frame.rows[data.eval_rows[i]];
        out << row.t.to_string() << ',' << csv::format_double(row.consumption_w) << ','
            << csv::format_double(predictions[i]) << '\n';
    }
}

void write_correlation_csv(const fs::path& path, const MergedFrame& frame) {
    const auto cm = eval::correlation_matrix(frame);
    auto out = open_out(path);
    out << "variable";
    for (const auto& n : cm.names) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < cm.names.size(); ++i) {
        out << cm.names[i];
        for (const auto& v : cm.values[i]) out << ',' << (v ? csv::format_double(*v) : "");
        out << '\n';
    }
}

void write_diurnal_csv(const fs::path& path, const MergedFrame& frame) {
    const auto profiles = eval::diurnal_profile(frame);
    auto out = open_out(path);
    out << "slot,time_decimal";
    for (const auto& [season, _] : profiles) out << ',' << to_string(season);
    out << '\n';
    for (int s = 0; s < kSlotsPerDay; ++s) {
        out << s << ',' << csv::format_double(s * kSlotMinutes / 60.0);
        for (const auto& [_, profile] : profiles) {
            out << ',';
            if (profile[static_cast<std::size_t>(s)]) out << csv::format_double(*profile[static_cast<std::size_t>(s)]);
        }
        out << '\n';
    }
}

void write_history_csv(const fs::path& path, const nn::TrainHistory& history) {
    auto out = open_out(path);
    out << "epoch,train_loss,val_loss\n";
    for (const auto& e : history.epochs)
        out << e.epoch << ',' << csv::format_double(e.train_loss) << ',' << csv::format_double(e.val_loss) << '\n';
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace gridcast::experiment
