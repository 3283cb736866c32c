#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridcast/metrics.hpp"
#include "gridcast/report.hpp"
#include "support.hpp"

using namespace gridcast;
using namespace gridcast::eval;
using testing::Gen;

namespace {

using Vec = std::vector<double>;

double rmse_ref(const Vec& p, const Vec& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - a[i]) * (p[i] - a[i]);
    return std::sqrt(s / static_cast<double>(p.size()));
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("rmse and mae examples") {
    CHECK(rmse(Vec{1, 2, 3}, Vec{1, 2, 3}) == 0.0);
    CHECK(rmse(Vec{0, 0}, Vec{3, 4}) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
    CHECK(std::abs(rmse(Vec{0, 0}, Vec{3, 4}) - 3.53553) < 1e-5);
    CHECK(rmse(Vec{2}, Vec{5}) == 3.0);
    CHECK(mae(Vec{4, 5}, Vec{4, 5}) == 0.0);
    CHECK(mae(Vec{0, 0}, Vec{3, 4}) == 3.5);
    CHECK(mae(Vec{2, -2}, Vec{0, 0}) == 2.0);
    CHECK_ERRC(rmse(Vec{1}, Vec{1, 2}), Errc::LengthMismatch);
    CHECK_ERRC(mae(Vec{}, Vec{}), Errc::EmptyInput);
}

TEST_CASE("r2 examples") {
    CHECK(r2(Vec{1, 5, 2}, Vec{1, 5, 2}) == 1.0);
    CHECK(r2(Vec{1, 1}, Vec{0, 2}) == 0.0);
    CHECK(r2(Vec{10, 10}, Vec{0, 2}) == doctest::Approx(-81.0).epsilon(1e-12));
    CHECK_ERRC(r2(Vec{1, 2, 3}, Vec{4, 4, 4}), Errc::ZeroVariance);
    CHECK_ERRC(r2(Vec{1}, Vec{4}), Errc::TooFewRows);
    const auto m = compute_metrics(Vec{1, 2, 3}, Vec{4, 4, 4});
    CHECK_FALSE(m.r2.has_value());
    CHECK(m.rmse == doctest::Approx(std::sqrt(14.0 / 3.0)));
    CHECK(m.n == 3);
}

TEST_CASE("pearson examples") {
    CHECK(pearson(Vec{1, 2, 4}, Vec{1, 2, 4}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pearson(Vec{1, 2, 4}, Vec{-1, -2, -4}) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(pearson(Vec{1, 0, -1, 0}, Vec{0, 1, 0, -1})) < 1e-15);
    CHECK_ERRC(pearson(Vec{1, 2, 3}, Vec{7, 7, 7}), Errc::ZeroVariance);
    testing::for_all(100, [](Gen& g) {
        const std::size_t n = g.size(2, 60);
        const auto x = g.vec(n), y = g.vec(n);
        const double r = pearson(x, y);
        CHECK(r == doctest::Approx(testing::pearson_ref(x, y)).epsilon(1e-10));
        CHECK(std::abs(r) <= 1.0);
    });
}

TEST_CASE("rmse >= mae >= 0 on random vectors") {
    testing::for_all(1000, [](Gen& g) {
        const std::size_t n = g.size(1, 40);
        const auto p = g.vec(n, -1e3, 1e3), a = g.vec(n, -1e3, 1e3);
        const double r = rmse(p, a), m = mae(p, a);
        CHECK(m >= 0.0);
        CHECK(r >= m * (1.0 - 1e-15));
        CHECK(r == doctest::Approx(rmse_ref(p, a)).epsilon(1e-12));
    });
}

TEST_CASE("r2 of the mean predictor is zero") {
    testing::for_all(500, [](Gen& g) {
        const std::size_t n = g.size(2, 100);
        const auto a = g.vec(n, -500, 5000);
        const Vec p(n, testing::mean_of(a));
        CHECK(std::abs(r2(p, a)) <= 1e-12);
    });
}

TEST_CASE("r2 is invariant under a common affine map") {
    testing::for_all(500, [](Gen& g) {
        const std::size_t n = g.size(2, 100);
        const auto a = g.vec(n, 0, 3000), p = g.vec(n, 0, 3000);
        const double scale = g.coin() ? g.real(1e-3, 1e3) : -g.real(1e-3, 1e3);
        const double shift = g.real(-1e4, 1e4);
        Vec a2(n), p2(n);
        for (std::size_t i = 0; i < n; ++i) {
            a2[i] = scale * a[i] + shift;
            p2[i] = scale * p[i] + shift;
        }
        CHECK(std::abs(r2(p2, a2) - r2(p, a)) <= 1e-9 * std::max(1.0, std::abs(r2(p, a))));
    });
}

TEST_CASE("correlation matrix") {
    auto frame = testing::toy_frame(20);
    const auto cm = correlation_matrix(frame);
    REQUIRE(cm.names.size() == 7);
    CHECK(cm.names.back() == "consumption_w");
    std::vector<Vec> cols;
    for (std::size_t c = 0; c < kWeatherFields; ++c) cols.push_back(frame.weather_column(static_cast<WeatherField>(c)));
    cols.push_back(frame.consumption());
    for (std::size_t i = 0; i < 7; ++i) {
        REQUIRE(cm.values[i][i].has_value());
        CHECK(*cm.values[i][i] == 1.0);
        for (std::size_t j = 0; j < 7; ++j) {
            REQUIRE(cm.values[i][j].has_value());
            CHECK(*cm.values[i][j] == *cm.values[j][i]);
            if (i != j) CHECK(*cm.values[i][j] == doctest::Approx(testing::pearson_ref(cols[i], cols[j])).epsilon(1e-10));
        }
    }

    for (auto& r : frame.rows) r.weather[4] = r.weather[0];
    for (auto& r : frame.rows) r.weather[1] = 3.0;
    const auto dup = correlation_matrix(frame);
    CHECK(*dup.values[0][4] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(dup.values[1][0].has_value());
    CHECK_FALSE(dup.values[6][1].has_value());
    CHECK(*dup.values[1][1] == 1.0);
}

TEST_CASE("stratify by season") {
    std::vector<DatedPair> jan;
    for (unsigned d = 1; d <= 20; ++d)
        jan.push_back({TimePoint(Date{std::chrono::year{2023}, std::chrono::January, std::chrono::day{d}}, 12, 0),
                       static_cast<double>(d), static_cast<double>(d * d)});
    const auto only = stratify_by_season(jan);
    REQUIRE(only.size() == 1);
    CHECK(only.begin()->first == Season::DJF);

    testing::for_all(50, [](Gen& g) {
        std::vector<DatedPair> pairs;
        const std::size_t n = g.size(1, 300);
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned m = static_cast<unsigned>(g.size(1, 12));
            pairs.push_back({TimePoint(Date{std::chrono::year{2022}, std::chrono::month{m}, std::chrono::day{1}}, 0, 0),
                             g.real(0, 100), g.real(0, 100)});
        }
        const auto strata = stratify_by_season(pairs);
        std::size_t total = 0;
        for (const auto& [season, ms] : strata) {
            total += ms.n;
            Vec p, a;
            for (const auto& dp : pairs)
                if (season_of(dp.t) == season) {
                    p.push_back(dp.predicted);
                    a.push_back(dp.actual);
                }
            CHECK(ms.n == p.size());
            CHECK(ms.rmse == doctest::Approx(rmse_ref(p, a)).epsilon(1e-12));
        }
        CHECK(total == n);
    });
}

TEST_CASE("diurnal profile") {
    auto frame = testing::toy_frame(10, 2023, 7, 1);
    for (auto& r : frame.rows) r.consumption_w = 640.0;
    const auto flat = diurnal_profile(frame);
    REQUIRE(flat.size() == 1);
    REQUIRE(flat.count(Season::JJA) == 1);
    const auto& prof = flat.at(Season::JJA);
    CHECK(prof.size() == 288);
    for (const auto& v : prof) CHECK(v.value() == 640.0);

    auto peaks = testing::toy_frame(9, 2023, 1, 1);
    for (auto& r : peaks.rows) {
        const int slot = r.t.hour() * 12 + r.t.minute() / 5;
        r.consumption_w = 300.0 + (slot == 90 ? 2000.0 : 0.0) + (slot == 230 ? 2500.0 : 0.0);
    }
    const auto& p = diurnal_profile(peaks).at(Season::DJF);
    const auto argmax = std::max_element(p.begin(), p.end(),
                                         [](const auto& x, const auto& y) { return x.value() < y.value(); }) - p.begin();
    CHECK(argmax == 230);
    CHECK(p[90].value() == 2300.0);
    CHECK(p[89].value() == 300.0);
    const auto mean = diurnal_profile(peaks, Statistic::Mean).at(Season::DJF);
    CHECK(mean[230].value() == 2800.0);
}

TEST_CASE("report round trips through json and csv") {
    EvalReport rep;
    rep.config = {{"seed", 7}, {"window", 24}};
    rep.config_hash = "00ff00ff00ff00ff";
    rep.seed = 7;
    rep.generated_at = "2024-01-01T00:00:00Z";
    rep.rows.push_back({"lstm", "test", compute_metrics(Vec{1, 2, 3.5}, Vec{1, 2.5, 3})});
    rep.rows.push_back({"naive", "test", compute_metrics(Vec{1, 2}, Vec{5, 5})});
    rep.rows.push_back({"lstm", "test:scaled", compute_metrics(Vec{0.1, 0.2}, Vec{0.15, 0.3}, Units::Scaled)});
    rep.training.push_back({"lstm", 10451, 12, 2, 0.0123});

    const testing::TempDir dir("report");
    write_report_json(dir.path() / "r.json", rep);
    const auto back = read_report_json(dir.path() / "r.json");
    CHECK(report_to_json(back) == report_to_json(rep));
    CHECK(render_table(back) == render_table(rep));
    REQUIRE(back.find("lstm", "test") != nullptr);
    CHECK(back.find("lstm", "test")->rmse == rep.rows[0].metrics.rmse);
    CHECK_FALSE(back.find("naive", "test")->r2.has_value());
    CHECK(back.find("lstm", "test:scaled")->units == Units::Scaled);
    CHECK(back.find("mlp", "test") == nullptr);
    CHECK(back.training.at(0).params == 10451);

    std::ostringstream csv;
    write_report_csv(csv, rep);
    const auto text = csv.str();
    CHECK(text.rfind("model,slice,metric,units,value\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 4);
    CHECK(text.find("lstm,test:scaled,mae,scaled,") != std::string::npos);
    CHECK_ERRC(report_from_json(nlohmann::json::array()), Errc::Parse);
}

}
