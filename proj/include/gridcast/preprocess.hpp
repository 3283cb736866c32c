#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gridcast/frame.hpp"
#include "gridcast/matrix.hpp"

namespace gridcast::prep {

/// Per-column extrema of the training rows.
struct ScalerParams {
    std::vector<std::string> columns;
    std::vector<double> min;
    std::vector<double> max;

    std::size_t size() const noexcept { return min.size(); }
    bool fitted() const noexcept { return !min.empty() && min.size() == max.size(); }
    bool operator==(const ScalerParams&) const = default;
};

ScalerParams fit_scaler(const Matrix& train, std::vector<std::string> columns = {});
ScalerParams fit_scaler(std::span<const double> column, std::string name = {});

/// (x - min) / (max - min); constant columns map to 0; no clamping.
Matrix transform(const Matrix& x, const ScalerParams& s);
Matrix inverse_transform(const Matrix& y, const ScalerParams& s);

/// Column-vector forms for a single fitted column `col`.
std::vector<double> transform(std::span<const double> x, const ScalerParams& s, std::size_t col = 0);
std::vector<double> inverse_transform(std::span<const double> y, const ScalerParams& s, std::size_t col = 0);

/// Flat JSON: {"columns": [...], "min": [...], "max": [...]}.
void save_scaler(const std::filesystem::path& path, const ScalerParams& s);
ScalerParams load_scaler(const std::filesystem::path& path);
std::string scaler_to_json(const ScalerParams& s);
ScalerParams scaler_from_json(const std::string& text);

/// Rows [0, boundary) train, [boundary, total) test.
struct SplitIndex {
    std::size_t boundary = 0;
    std::size_t total = 0;

    std::size_t train_size() const noexcept { return boundary; }
    std::size_t test_size() const noexcept { return total - boundary; }
};

SplitIndex chronological_split(std::size_t rows, double ratio);
SplitIndex chronological_split(const MergedFrame& frame, double ratio);

inline constexpr std::size_t kStaticFeatures = kWeatherFields + 1;

/// Weather columns in WeatherField order followed by time_decimal.
std::vector<std::string> static_feature_names();

struct FeatureMatrix {
    Matrix x;               // N x 7
    std::vector<double> y;  // consumption, W
};

FeatureMatrix make_features(const MergedFrame& frame, std::size_t begin, std::size_t end);
FeatureMatrix make_features(const MergedFrame& frame);

/// Row m of `inputs` holds window m flattened step-major (L x F).
struct WindowBatch {
    Matrix inputs;                        // M x (L*F)
    std::vector<double> targets;          // M
    std::vector<std::size_t> target_row;  // index of each target in the source series
    std::size_t length = 0;
    std::size_t features = 1;

    std::size_t count() const noexcept { return targets.size(); }
};

/// Exactly N - L windows: window i = series[i .. i+L-1], target series[i+L].
/// `row_offset` is added to target_row so windows over a slice report source indices.
WindowBatch make_windows(std::span<const double> series, std::size_t length, std::size_t row_offset = 0);

/// Multivariate form: `series` is N x F, targets come from column `target_col`.
WindowBatch make_windows(const Matrix& series, std::size_t length, std::size_t target_col,
                         std::size_t row_offset = 0);

}  // namespace gridcast::prep
