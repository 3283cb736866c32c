// gridcast command line: synth, ingest, train, evaluate, compare, report.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"
#include "gridcast/experiment.hpp"

namespace fs = std::filesystem;
using namespace gridcast;
using experiment::ExperimentConfig;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct StageError : std::runtime_error {
    StageError(const std::string& stage, const Error& e)
        : std::runtime_error(stage + ": " + e.what()), code(e.code()) {}
    Errc code;
};

template <class F>
auto stage(const std::string& name, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

struct Common {
    std::string config = "default";
    std::optional<std::uint64_t> seed;
    std::string out;
    bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "JSON config file, or 'default'");
    cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
    cmd->add_option("--out", c.out, "Output directory (overrides GRIDCAST_OUT and the config)");
    cmd->add_flag("-v,--verbose", c.verbose, "Per-epoch progress on stderr");
}

ExperimentConfig resolve(const Common& c) {
    auto cfg = stage("config", [&] { return experiment::load_config(c.config); });
    if (c.seed) {
        cfg.seed = *c.seed;
        cfg.synth.seed = *c.seed;
    }
    if (const char* env = std::getenv("GRIDCAST_OUT"); env && *env) cfg.output_dir = env;
    if (!c.out.empty()) cfg.output_dir = c.out;
    if (c.verbose) cfg.verbose = true;
    return cfg;
}

void print_ingest(const experiment::IngestSummary& s, const MergedFrame& frame) {
    std::cout << "rows " << frame.size() << "\n";
    if (!frame.empty())
        std::cout << "first " << frame.rows.front().t.to_string() << "\nlast " << frame.rows.back().t.to_string()
                  << "\n";
    std::cout << "weather_days " << s.weather_days << "\n"
              << "meter_drops missing=" << s.meter_drops.missing_watts
              << " malformed=" << s.meter_drops.malformed_timestamp
              << " duplicate=" << s.meter_drops.duplicate_timestamp << " negative=" << s.meter_drops.negative_watts
              << "\n"
              << "solar_unmatched grid_only=" << s.solar_grid_only << " solar_only=" << s.solar_solar_only << "\n"
              << "dropped_no_weather " << s.dropped_no_weather << "\n";
}

/// Recomputes the scaled test inputs with scalers loaded from disk.
void use_scalers(experiment::PreparedData& data, const models::FeatureScalers& scalers) {
    data.scalers = scalers;
    const auto consumption = data.frame.consumption();
    data.scaled_series = prep::transform(consumption, scalers.target);
    const std::size_t b = data.split.boundary;
    data.eval_windows =
        prep::make_windows(std::span<const double>(data.scaled_series).subspan(b), data.eval_windows.length, b);
}

void write_report(const eval::EvalReport& report, const fs::path& dir) {
    eval::write_report_json(dir / "report.json", report);
    eval::write_report_csv(dir / "report.csv", report);
}

int cmd_synth(const Common& c, std::optional<std::size_t> days, bool solar, bool monthly) {
    auto cfg = resolve(c);
    if (days) cfg.synth.days = *days;
    if (solar) cfg.synth.solar = true;
    if (monthly) cfg.monthly_weather = true;
    const auto data = stage("synth", [&] {
        synth::validate(cfg.synth);
        return synth::generate(cfg.synth);
    });
    const auto paths = stage("write", [&] { return synth::write_csvs(data, cfg.output_dir, cfg.monthly_weather); });
    for (const auto& p : paths) std::cout << p.string() << "\n";
    return 0;
}

int cmd_ingest(const Common& c, const std::string& meter, const std::string& solar, const std::string& weather) {
    auto cfg = resolve(c);
    if (!meter.empty()) {
        cfg.source = "files";
        cfg.meter_csv = meter;
    }
    if (!solar.empty()) cfg.solar_csv = solar;
    if (!weather.empty()) cfg.weather = weather;
    experiment::IngestSummary summary;
    const auto frame = stage("ingest", [&] { return experiment::load_frame(cfg, &summary); });
    const auto violations = frame_violations(frame);
    if (!violations.empty()) throw StageError("ingest", Error(Errc::InvalidArgument, violations.front()));
    const fs::path out = fs::path(cfg.output_dir) / "merged.csv";
    stage("write", [&] {
        fs::create_directories(out.parent_path());
        ingest::write_frame_csv(out, frame);
        return 0;
    });
    print_ingest(summary, frame);
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_train(const Common& c, const std::string& model, const std::string& frame_csv) {
    auto cfg = resolve(c);
    if (!frame_csv.empty()) {
        cfg.source = "frame";
        cfg.frame_csv = frame_csv;
    }
    const auto frame = stage("ingest", [&] { return experiment::load_frame(cfg); });
    const auto data = stage("preprocess", [&] { return experiment::prepare(frame, cfg); });
    const fs::path dir = fs::path(cfg.output_dir) / "models";
    nn::TrainHistory history;
    std::size_t params = 0;
    stage("train", [&] {
        if (model == experiment::kMlp) {
            auto t = experiment::train_mlp(data, cfg);
            nn::write_model_file(dir / "mlp.model", t.model.to_file(cfg.seed));
            history = t.history;
            params = t.model.param_count();
        } else {
            auto t = experiment::train_lstm(data, cfg);
            nn::write_model_file(dir / "lstm.model", t.model.to_file(cfg.seed));
            history = t.history;
            params = t.model.param_count();
        }
        return 0;
    });
    stage("write", [&] {
        prep::save_scaler(dir / "scaler_features.json", data.scalers.features);
        prep::save_scaler(dir / "scaler_target.json", data.scalers.target);
        experiment::write_history_csv(dir / (model + "_history.csv"), history);
        return 0;
    });
    std::cout << model << " params " << params << " epochs " << history.epochs.size() << " best_epoch "
              << history.best_epoch << " best_val_loss " << csv::format_double(history.best_val_loss) << "\n";
    return 0;
}

int cmd_evaluate(const Common& c, const std::string& model_path, const std::string& frame_csv) {
    auto cfg = resolve(c);
    if (!frame_csv.empty()) {
        cfg.source = "frame";
        cfg.frame_csv = frame_csv;
    }
    const fs::path mp = model_path;
    const auto file = stage("load", [&] { return nn::read_model_file(mp); });
    const models::FeatureScalers scalers = stage("load", [&] {
        return models::FeatureScalers{prep::load_scaler(mp.parent_path() / "scaler_features.json"),
                                      prep::load_scaler(mp.parent_path() / "scaler_target.json")};
    });
    const auto frame = stage("ingest", [&] { return experiment::load_frame(cfg); });
    auto data = stage("preprocess", [&] { return experiment::prepare(frame, cfg); });
    stage("preprocess", [&] {
        use_scalers(data, scalers);
        return 0;
    });
    auto report = experiment::make_report_shell(cfg);
    stage("evaluate", [&] {
        if (file.kind == "mlp") {
            const auto m = models::Mlp::from_file(file);
            experiment::score_model(report, data, experiment::kMlp, experiment::predict_mlp(data, m), cfg);
        } else if (file.kind == "lstm") {
            const auto m = models::LstmNet::from_file(file);
            experiment::score_model(report, data, experiment::kLstm, experiment::predict_lstm(data, m), cfg);
        } else {
            throw Error(Errc::Parse, "unknown model kind '" + file.kind + "'");
        }
        return 0;
    });
    stage("write", [&] {
        write_report(report, cfg.output_dir);
        return 0;
    });
    std::cout << eval::render_table(report);
    return 0;
}

int cmd_compare(const Common& c, const std::string& frame_csv) {
    auto cfg = resolve(c);
    if (!frame_csv.empty()) {
        cfg.source = "frame";
        cfg.frame_csv = frame_csv;
    }
    const auto frame = stage("ingest", [&] { return experiment::load_frame(cfg); });
    const auto result = stage("run", [&] { return experiment::run_on_frame(frame, cfg, true); });
    std::cout << eval::render_table(result.report);
    return 0;
}

int cmd_report(const Common& c, const std::string& input, const std::string& format) {
    fs::path path = input;
    if (path.empty()) path = resolve(c).output_dir;
    if (fs::is_directory(path)) path /= "report.json";
    const auto report = stage("load", [&] { return eval::read_report_json(path); });
    if (format == "json")
        std::cout << eval::report_to_json(report).dump(2) << "\n";
    else if (format == "csv")
        eval::write_report_csv(std::cout, report);
    else
        std::cout << eval::render_table(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridcast: short-term residential load forecasting"};
    app.require_subcommand(1);

    Common common;
    std::optional<std::size_t> days;
    bool solar = false, monthly = false;
    std::string meter, solar_csv, weather, model = experiment::kLstm, model_path, frame_csv, input, format = "table";

    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic household as meter/weather CSVs");
    add_common(synth_cmd, common);
    synth_cmd->add_option("--days", days, "Days to generate");
    synth_cmd->add_flag("--solar", solar, "Add a rooftop solar stream");
    synth_cmd->add_flag("--monthly-weather", monthly, "Write weather as weather/YYYYMM.csv files");

    auto* ingest_cmd = app.add_subcommand("ingest", "Validate and merge meter/weather files into merged.csv");
    add_common(ingest_cmd, common);
    ingest_cmd->add_option("--meter", meter, "Meter CSV (timestamp,watts)");
    ingest_cmd->add_option("--solar", solar_csv, "Solar generation CSV");
    ingest_cmd->add_option("--weather", weather, "Weather CSV or directory of YYYYMM.csv files");

    auto* train_cmd = app.add_subcommand("train", "Train one model");
    add_common(train_cmd, common);
    train_cmd->add_option("--model", model, "mlp or lstm")->check(CLI::IsMember({"mlp", "lstm"}));
    train_cmd->add_option("--frame", frame_csv, "Merged frame CSV (overrides the config data source)");

    auto* eval_cmd = app.add_subcommand("evaluate", "Score a saved model on the test slice");
    add_common(eval_cmd, common);
    eval_cmd->add_option("--model", model_path, "Model file written by train")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--frame", frame_csv, "Merged frame CSV (overrides the config data source)");

    auto* compare_cmd = app.add_subcommand("compare", "Train and score the full roster");
    add_common(compare_cmd, common);
    compare_cmd->add_option("--frame", frame_csv, "Merged frame CSV (overrides the config data source)");

    auto* report_cmd = app.add_subcommand("report", "Re-render a stored report");
    add_common(report_cmd, common);
    report_cmd->add_option("--input", input, "report.json or the directory holding it");
    report_cmd->add_option("--format", format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*synth_cmd) return cmd_synth(common, days, solar, monthly);
        if (*ingest_cmd) return cmd_ingest(common, meter, solar_csv, weather);
        if (*train_cmd) return cmd_train(common, model, frame_csv);
        if (*eval_cmd) return cmd_evaluate(common, model_path, frame_csv);
        if (*compare_cmd) return cmd_compare(common, frame_csv);
        if (*report_cmd) return cmd_report(common, input, format);
    } catch (const StageError& e) {
        std::cerr << "gridcast: " << e.what() << "\n";
        return e.code == Errc::InvalidConfig ? kExitUsage : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "gridcast: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
