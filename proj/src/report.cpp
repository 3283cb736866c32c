#include "gridcast/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"

namespace gridcast::eval {

using nlohmann::json;

const MetricSet* EvalReport::find(const std::string& model, const std::string& slice) const {
    for (const auto& r : rows)
        if (r.model == model && r.slice == slice) return &r.metrics;
    return nullptr;
}

json report_to_json(const EvalReport& report) {
    json j;
    j["format"] = "gridcast-report/1";
    j["config"] = report.config;
    j["config_hash"] = report.config_hash;
    j["seed"] = report.seed;
    j["generated_at"] = report.generated_at;
    json rows = json::array();
    for (const auto& r : report.rows) {
        json row{{"model", r.model},
                 {"slice", r.slice},
                 {"n", r.metrics.n},
                 {"units", std::string(to_string(r.metrics.units))},
                 {"rmse", r.metrics.rmse},
                 {"mae", r.metrics.mae}};
        row["r2"] = r.metrics.r2 ? json(*r.metrics.r2) : json(nullptr);
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    json training = json::array();
    for (const auto& t : report.training)
        training.push_back({{"model", t.model},
                            {"params", t.params},
                            {"epochs_run", t.epochs_run},
                            {"best_epoch", t.best_epoch},
                            {"best_val_loss", t.best_val_loss}});
    j["training"] = std::move(training);
    return j;
}

EvalReport report_from_json(const json& j) {
    try {
        EvalReport r;
        r.config = j.at("config");
        r.config_hash = j.at("config_hash").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.generated_at = j.value("generated_at", "");
        for (const auto& row : j.at("rows")) {
            ReportRow out;
            out.model = row.at("model").get<std::string>();
            out.slice = row.at("slice").get<std::string>();
            out.metrics.n = row.at("n").get<std::size_t>();
            out.metrics.units = row.at("units").get<std::string>() == "scaled" ? Units::Scaled : Units::Watts;
            out.metrics.rmse = row.at("rmse").get<double>();
            out.metrics.mae = row.at("mae").get<double>();
            if (!row.at("r2").is_null()) out.metrics.r2 = row.at("r2").get<double>();
            r.rows.push_back(std::move(out));
        }
        for (const auto& t : j.value("training", json::array()))
            r.training.push_back({t.at("model").get<std::string>(), t.at("params").get<std::size_t>(),
                                  t.at("epochs_run").get<std::size_t>(), t.at("best_epoch").get<std::size_t>(),
                                  t.at("best_val_loss").get<double>()});
        return r;
    } catch (const json::exception& e) {
        throw Error(Errc::Parse, std::string("report json: ") + e.what());
    }
}

void write_report_json(const std::filesystem::path& path, const EvalReport& report) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << report_to_json(report).dump(2) << '\n';
}

EvalReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    try {
        return report_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(Errc::Parse, path.string() + ": " + e.what());
    }
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "model,slice,metric,units,value\n";
    for (const auto& r : report.rows) {
        const std::string units(to_string(r.metrics.units));
        out << r.model << ',' << r.slice << ",rmse," << units << ',' << csv::format_double(r.metrics.rmse) << '\n';
        out << r.model << ',' << r.slice << ",mae," << units << ',' << csv::format_double(r.metrics.mae) << '\n';
        out << r.model << ',' << r.slice << ",r2,," << (r.metrics.r2 ? csv::format_double(*r.metrics.r2) : "") << '\n';
        out << r.model << ',' << r.slice << ",n,," << r.metrics.n << '\n';
    }
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    write_report_csv(out, report);
}

std::string render_table(const EvalReport& report) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %-12s %8s %12s %12s %10s\n", "model", "slice", "n", "rmse", "mae", "r2");
    os << line;
    for (const auto& r : report.rows) {
        const auto& m = r.metrics;
        char r2[32] = "n/a";
        if (m.r2) std::snprintf(r2, sizeof r2, "%+.4f", *m.r2);
        std::snprintf(line, sizeof line, "%-16s %-12s %8zu %12.4f %12.4f %10s\n", r.model.c_str(), r.slice.c_str(), m.n,
                      m.rmse, m.mae, r2);
        os << line;
    }
    return os.str();
}

}  // namespace gridcast::eval
