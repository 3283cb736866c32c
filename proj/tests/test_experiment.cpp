#include <algorithm>
#include <filesystem>
#include <set>

#include "gridcast/experiment.hpp"
#include "support.hpp"

using namespace gridcast;
using namespace gridcast::experiment;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.synth.days = 10;
    c.window = 6;
    c.train.max_epochs = 3;
    c.train.batch_size = 128;
    return c;
}

nlohmann::json without_timestamp(const eval::EvalReport& r) {
    auto j = eval::report_to_json(r);
    j.erase("generated_at");
    return j;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config defaults round trip through json") {
    const ExperimentConfig def;
    const auto j = config_to_json(def);
    CHECK(config_to_json(config_from_json(j)) == j);
    CHECK(config_to_json(config_from_json(nlohmann::json::object())) == j);
    CHECK(j.at("window") == 24);
    CHECK(j.at("split_ratio") == 0.8);
    CHECK(j.at("roster") == "naive,seasonal-naive,mlp,lstm");
    CHECK_FALSE(j.contains("output_dir"));
    CHECK(config_to_json(load_config("default")) == j);
}

TEST_CASE("config overrides apply and propagate the seed") {
    const auto c = config_from_json({{"seed", 9}, {"window", 12}, {"synth.solar", true}, {"train.exec", "serial"},
                                     {"roster", "lstm,naive"}, {"output_dir", "/tmp/x"}});
    CHECK(c.seed == 9);
    CHECK(c.synth.seed == 9);
    CHECK(c.window == 12);
    CHECK(c.synth.solar);
    CHECK(c.train.exec == nn::Exec::Serial);
    CHECK(c.roster == std::vector<std::string>{"lstm", "naive"});
    CHECK(c.output_dir == fs::path("/tmp/x"));
}

TEST_CASE("invalid configs raise InvalidConfig") {
    CHECK_ERRC(config_from_json({{"windw", 24}}), Errc::InvalidConfig);
    CHECK_ERRC(config_from_json({{"window", "long"}}), Errc::InvalidConfig);
    CHECK_ERRC(config_from_json({{"window", 0}}), Errc::InvalidConfig);
    CHECK_ERRC(config_from_json({{"split_ratio", 1.5}}), Errc::InvalidConfig);
    CHECK_ERRC(config_from_json({{"roster", "lstm,arima"}}), Errc::InvalidConfig);
    CHECK_ERRC(config_from_json({{"data.source", "cloud"}}), Errc::InvalidConfig);
    CHECK_ERRC(config_from_json({{"synth.days", 1}}), Errc::InvalidConfig);
    CHECK_ERRC(config_from_json({{"train.exec", "gpu"}}), Errc::InvalidConfig);
    CHECK_ERRC(config_from_json(nlohmann::json::array()), Errc::InvalidConfig);
    const testing::TempDir dir("bad-config");
    testing::write_text(dir.path() / "c.json", "{ not json");
    CHECK_ERRC(load_config((dir.path() / "c.json").string()), Errc::InvalidConfig);
}

TEST_CASE("config hash is stable and content-sensitive") {
    ExperimentConfig a;
    const auto h = config_hash(a);
    CHECK(h.size() == 16);
    CHECK(config_hash(ExperimentConfig{}) == h);
    a.output_dir = "elsewhere";
    CHECK(config_hash(a) == h);
    a.seed = 43;
    CHECK(config_hash(a) != h);
}

TEST_CASE("prepare keeps test data out of fitting and aligns evaluation rows") {
    const auto c = small_config();
    const auto frame = load_frame(c);
    const auto data = prepare(frame, c);
    const std::size_t n = frame.size(), b = data.split.boundary, L = c.window;
    CHECK(b == 2304);
    CHECK(data.val_boundary == b - 230);

    const auto cons = frame.consumption();
    CHECK(data.scalers.target.min[0] == *std::min_element(cons.begin(), cons.begin() + static_cast<long>(b)));
    CHECK(data.scalers.target.max[0] == *std::max_element(cons.begin(), cons.begin() + static_cast<long>(b)));

    REQUIRE(data.eval_rows.size() == n - b - L);
    CHECK(data.eval_rows.front() == b + L);
    CHECK(data.eval_rows.back() == n - 1);
    CHECK(data.eval_windows.count() == data.eval_rows.size());
    CHECK(data.eval_features.rows() == data.eval_rows.size());
    for (std::size_t i = 0; i < data.eval_rows.size(); ++i) {
        const std::size_t r = data.eval_rows[i];
        CHECK(data.eval_windows.target_row[i] == r);
        CHECK(data.eval_windows.inputs(i, L - 1) == data.scaled_series[r - 1]);
        CHECK(data.eval_windows.inputs(i, 0) == data.scaled_series[r - L]);
        CHECK(data.eval_windows.inputs(i, 0) == data.scaled_series[r - L]);
    }
    CHECK(data.lstm_train.size() == data.val_boundary - L);
    CHECK(data.lstm_val.size() == b - data.val_boundary - L);
    CHECK(data.mlp_train.size() == data.val_boundary);
    CHECK(data.mlp_val.size() == b - data.val_boundary);

    ExperimentConfig tiny = c;
    tiny.synth.days = 2;
    tiny.window = 200;
    CHECK_ERRC(prepare(load_frame(tiny), tiny), Errc::SeriesTooShort);
}

TEST_CASE("a naive-only roster yields one model in the report") {
    auto c = small_config();
    c.roster = {kNaive};
    const auto run = run_experiment(c, false);
    std::set<std::string> models;
    for (const auto& r : run.report.rows) models.insert(r.model);
    CHECK(models == std::set<std::string>{"naive"});
    REQUIRE(run.report.find("naive", "test") != nullptr);
    CHECK_FALSE(run.mlp.has_value());
    CHECK_FALSE(run.lstm.has_value());
}

TEST_CASE("a full small run is deterministic and writes every artifact") {
    const testing::TempDir dir("experiment-run");
    auto c = small_config();
    c.output_dir = dir.path() / "a";
    c.scaled_metrics = true;
    const auto first = run_experiment(c);
    c.output_dir = dir.path() / "b";
    const auto second = run_experiment(c);
    CHECK(without_timestamp(first.report) == without_timestamp(second.report));
    CHECK(first.report.config == config_to_json(c));
    CHECK(first.report.config_hash == config_hash(c));
    for (const char* m : {"naive", "seasonal-naive", "mlp", "lstm"}) {
        REQUIRE(first.report.find(m, "test") != nullptr);
        CHECK(first.report.find(m, "test:scaled") != nullptr);
        CHECK(first.report.find(m, "test")->n == first.report.find("naive", "test")->n);
        CHECK(fs::exists(dir.path() / "a" / "predictions" / (std::string(m) + ".csv")));
    }
    for (const char* f : {"config.json", "report.json", "report.csv", "models/mlp.model", "models/lstm.model",
                          "models/mlp_history.csv", "models/lstm_history.csv", "models/scaler_features.json",
                          "models/scaler_target.json", "analysis/correlation.csv", "analysis/diurnal_profile.csv"})
        CHECK_MESSAGE(fs::exists(dir.path() / "a" / f), f);
    CHECK(testing::read_text(dir.path() / "a" / "models" / "lstm.model") ==
          testing::read_text(dir.path() / "b" / "models" / "lstm.model"));
    const auto stored = eval::read_report_json(dir.path() / "a" / "report.json");
    CHECK(eval::report_to_json(stored) == eval::report_to_json(first.report));
}

TEST_CASE("files source reproduces the synthetic frame") {
    const testing::TempDir dir("experiment-files");
    auto c = small_config();
    c.synth.solar = true;
    const auto data = synth::generate(c.synth);
    synth::write_csvs(data, dir.path(), true);
    ExperimentConfig f = c;
    f.source = "files";
    f.meter_csv = dir.path() / "meter.csv";
    f.solar_csv = dir.path() / "solar.csv";
    f.weather = dir.path() / "weather";
    IngestSummary summary;
    const auto frame = load_frame(f, &summary);
    REQUIRE(frame.size() == data.frame.size());
    CHECK(summary.meter_drops.total() == 0);
    CHECK(summary.weather_days == 10);
    for (std::size_t i = 0; i < frame.size(); i += 97)
        CHECK(frame.rows[i].consumption_w == doctest::Approx(data.frame.rows[i].consumption_w).epsilon(1e-9));
}

}
