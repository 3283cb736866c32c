#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridcast/metrics.hpp"

namespace gridcast::eval {

/// One model scored on one slice ("test", "test/DJF", ...).
struct ReportRow {
    std::string model;
    std::string slice;
    MetricSet metrics;
};

struct TrainingSummary {
    std::string model;
    std::size_t params = 0;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
};

/// Model x slice metric table plus provenance: the full experiment config,
/// its hash, and the seed. `generated_at` is the only non-reproducible field.
struct EvalReport {
    nlohmann::json config = nlohmann::json::object();
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string generated_at;
    std::vector<ReportRow> rows;
    std::vector<TrainingSummary> training;

    const MetricSet* find(const std::string& model, const std::string& slice) const;
};

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

void write_report_json(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_report_json(const std::filesystem::path& path);

/// Long format: model,slice,metric,units,value (one line per metric).
void write_report_csv(std::ostream& out, const EvalReport& report);
void write_report_csv(const std::filesystem::path& path, const EvalReport& report);

/// Fixed-width text table for terminals.
std::string render_table(const EvalReport& report);

}  // namespace gridcast::eval
