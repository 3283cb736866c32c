#include "gridcast/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridcast/error.hpp"

namespace gridcast::prep {

namespace {

void check_columns(std::size_t cols, const ScalerParams& s) {
    if (!s.fitted()) throw Error(Errc::ScalerNotFitted, "scaler has no fitted columns");
    if (cols != s.size())
        throw Error(Errc::DimensionMismatch, "matrix has " + std::to_string(cols) + " columns, scaler has " +
                                                 std::to_string(s.size()));
}

double scale(double x, double lo, double hi) { return hi > lo ? (x - lo) / (hi - lo) : 0.0; }
double unscale(double y, double lo, double hi) { return hi > lo ? y * (hi - lo) + lo : lo; }

}  // namespace

ScalerParams fit_scaler(const Matrix& train, std::vector<std::string> columns) {
    if (train.rows() == 0 || train.cols() == 0) throw Error(Errc::EmptyInput, "cannot fit scaler on no rows");
    if (!columns.empty() && columns.size() != train.cols())
        throw Error(Errc::DimensionMismatch, "column names do not match matrix width");
    ScalerParams s;
    s.columns = std::move(columns);
    s.min.assign(train.row(0).begin(), train.row(0).end());
    s.max = s.min;
    for (std::size_t r = 1; r < train.rows(); ++r) {
        const auto row = train.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            s.min[c] = std::min(s.min[c], row[c]);
            s.max[c] = std::max(s.max[c], row[c]);
        }
    }
    return s;
}

ScalerParams fit_scaler(std::span<const double> column, std::string name) {
    Matrix m(column.size(), 1, std::vector<double>(column.begin(), column.end()));
    std::vector<std::string> names;
    if (!name.empty()) names.push_back(std::move(name));
    return fit_scaler(m, std::move(names));
}

Matrix transform(const Matrix& x, const ScalerParams& s) {
    check_columns(x.cols(), s);
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = scale(x(r, c), s.min[c], s.max[c]);
    return out;
}

Matrix inverse_transform(const Matrix& y, const ScalerParams& s) {
    check_columns(y.cols(), s);
    Matrix out(y.rows(), y.cols());
    for (std::size_t r = 0; r < y.rows(); ++r)
        for (std::size_t c = 0; c < y.cols(); ++c) out(r, c) = unscale(y(r, c), s.min[c], s.max[c]);
    return out;
}

std::vector<double> transform(std::span<const double> x, const ScalerParams& s, std::size_t col) {
    if (!s.fitted()) throw Error(Errc::ScalerNotFitted, "scaler has no fitted columns");
    if (col >= s.size()) throw Error(Errc::DimensionMismatch, "scaler column out of range");
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return scale(v, s.min[col], s.max[col]); });
    return out;
}

std::vector<double> inverse_transform(std::span<const double> y, const ScalerParams& s, std::size_t col) {
    if (!s.fitted()) throw Error(Errc::ScalerNotFitted, "scaler has no fitted columns");
    if (col >= s.size()) throw Error(Errc::DimensionMismatch, "scaler column out of range");
    std::vector<double> out(y.size());
    std::transform(y.begin(), y.end(), out.begin(), [&](double v) { return unscale(v, s.min[col], s.max[col]); });
    return out;
}

std::string scaler_to_json(const ScalerParams& s) {
    nlohmann::json j;
    j["columns"] = s.columns;
    j["min"] = s.min;
    j["max"] = s.max;
    return j.dump(2) + "\n";
}

ScalerParams scaler_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        ScalerParams s;
        s.columns = j.value("columns", std::vector<std::string>{});
        s.min = j.at("min").get<std::vector<double>>();
        s.max = j.at("max").get<std::vector<double>>();
        if (s.min.size() != s.max.size() || (!s.columns.empty() && s.columns.size() != s.min.size()))
            throw Error(Errc::Parse, "scaler arrays have inconsistent lengths");
        for (std::size_t c = 0; c < s.size(); ++c)
            if (s.max[c] < s.min[c]) throw Error(Errc::Parse, "scaler max below min");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Parse, std::string("scaler json: ") + e.what());
    }
}

void save_scaler(const std::filesystem::path& path, const ScalerParams& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << scaler_to_json(s);
}

ScalerParams load_scaler(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return scaler_from_json(ss.str());
}

SplitIndex chronological_split(std::size_t rows, double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error(Errc::InvalidArgument, "split ratio must lie in (0, 1)");
    if (rows < 2) throw Error(Errc::TooFewRows, "need at least 2 rows to split");
    const auto b = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(rows) + 1e-9));
    return {b, rows};
}

SplitIndex chronological_split(const MergedFrame& frame, double ratio) {
    return chronological_split(frame.size(), ratio);
}

std::vector<std::string> static_feature_names() {
    std::vector<std::string> names(kWeatherColumns.begin(), kWeatherColumns.end());
    names.emplace_back("time_decimal");
    return names;
}

FeatureMatrix make_features(const MergedFrame& frame, std::size_t begin, std::size_t end) {
    if (begin > end || end > frame.size()) throw Error(Errc::InvalidArgument, "feature row range out of bounds");
    FeatureMatrix fm{Matrix(end - begin, kStaticFeatures), {}};
    fm.y.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        const auto& r = frame.rows[i];
        auto row = fm.x.row(i - begin);
        std::copy(r.weather.begin(), r.weather.end(), row.begin());
        row[kWeatherFields] = r.time_decimal;
        fm.y.push_back(r.consumption_w);
    }
    return fm;
}

FeatureMatrix make_features(const MergedFrame& frame) { return make_features(frame, 0, frame.size()); }

WindowBatch make_windows(const Matrix& series, std::size_t length, std::size_t target_col,
                         std::size_t row_offset) {
    const std::size_t n = series.rows();
    const std::size_t f = series.cols();
    if (length == 0) throw Error(Errc::InvalidArgument, "window length must be positive");
    if (target_col >= f) throw Error(Errc::DimensionMismatch, "target column out of range");
    if (n <= length)
        throw Error(Errc::SeriesTooShort,
                    "series of " + std::to_string(n) + " rows cannot hold a window of " + std::to_string(length));
    const std::size_t m = n - length;
    WindowBatch wb;
    wb.length = length;
    wb.features = f;
    wb.inputs = Matrix(m, length * f);
    wb.targets.resize(m);
    wb.target_row.resize(m);
    const auto src = series.flat();
    for (std::size_t i = 0; i < m; ++i) {
        auto dst = wb.inputs.row(i);
        std::copy(src.begin() + static_cast<std::ptrdiff_t>(i * f),
                  src.begin() + static_cast<std::ptrdiff_t>((i + length) * f), dst.begin());
        wb.targets[i] = series(i + length, target_col);
        wb.target_row[i] = row_offset + i + length;
    }
    return wb;
}

WindowBatch make_windows(std::span<const double> series, std::size_t length, std::size_t row_offset) {
    Matrix m(series.size(), 1, std::vector<double>(series.begin(), series.end()));
    return make_windows(m, length, 0, row_offset);
}

}  // namespace gridcast::prep
