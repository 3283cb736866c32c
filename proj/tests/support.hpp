#pragma once

// Independent oracles and hand-rolled generators for the test suites. Nothing
// here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "gridcast/error.hpp"
#include "gridcast/frame.hpp"
#include "gridcast/matrix.hpp"

namespace testing {

#define CHECK_ERRC(expr, errc)                                               \
    do {                                                                     \
        bool thrown_ = false;                                                \
        try {                                                                \
            (void)(expr);                                                    \
        } catch (const gridcast::Error& e_) {                                \
            thrown_ = true;                                                  \
            CHECK_MESSAGE(e_.code() == (errc), gridcast::to_string(e_.code())); \
        }                                                                    \
        CHECK_MESSAGE(thrown_, "expected gridcast::Error from " #expr);      \
    } while (0)

/// Small generator kept separate from the library Rng.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    std::size_t size(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(eng_);
    }
    bool coin(double p = 0.5) { return real(0.0, 1.0) < p; }
    std::vector<double> vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
        std::vector<double> v(n);
        for (auto& x : v) x = real(lo, hi);
        return v;
    }
    gridcast::Matrix matrix(std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
        return gridcast::Matrix(r, c, vec(r * c, lo, hi));
    }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

/// Runs `body` for `cases` independent generator seeds.
inline void for_all(std::size_t cases, const std::function<void(Gen&)>& body, std::uint64_t base = 1000) {
    for (std::size_t i = 0; i < cases; ++i) {
        Gen g(base + i);
        body(g);
    }
}

// ---- numeric oracles -------------------------------------------------------

inline double sigm(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// y = x W^T + b by triple loop. W is out x in row-major.
inline gridcast::Matrix matmul_bias(const gridcast::Matrix& x, const std::vector<double>& w,
                                    const std::vector<double>& b, std::size_t out) {
    gridcast::Matrix y(x.rows(), out);
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t o = 0; o < out; ++o) {
            double s = b[o];
            for (std::size_t i = 0; i < x.cols(); ++i) s += w[o * x.cols() + i] * x(r, i);
            y(r, o) = s;
        }
    return y;
}

/// Scalar-by-scalar LSTM step. Gate g weights for unit j act on [h_prev, x].
/// `act` is the candidate / cell-output nonlinearity.
struct ScalarLstm {
    std::size_t F, H;
    const std::vector<double>& p;
    std::function<double(double)> act;

    double w(std::size_t gate, std::size_t j, std::size_t k) const { return p[(gate * H + j) * (H + F) + k]; }
    double b(std::size_t gate, std::size_t j) const { return p[4 * H * (H + F) + gate * H + j]; }
    double pre(std::size_t gate, std::size_t j, const std::vector<double>& h, const std::vector<double>& x) const {
        double s = b(gate, j);
        for (std::size_t k = 0; k < H; ++k) s += w(gate, j, k) * h[k];
        for (std::size_t k = 0; k < F; ++k) s += w(gate, j, H + k) * x[k];
        return s;
    }
    void step(const std::vector<double>& x, std::vector<double>& h, std::vector<double>& c) const {
        std::vector<double> hn(H), cn(H);
        for (std::size_t j = 0; j < H; ++j) {
            const double f = sigm(pre(0, j, h, x));
            const double i = sigm(pre(1, j, h, x));
            const double g = act(pre(2, j, h, x));
            const double o = sigm(pre(3, j, h, x));
            cn[j] = f * c[j] + i * g;
            hn[j] = o * act(cn[j]);
        }
        h = hn;
        c = cn;
    }
};

/// Central finite difference of f at every coordinate of x.
inline std::vector<double> numeric_gradient(std::vector<double> x, const std::function<double(const std::vector<double>&)>& f,
                                            double h = 1e-5) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double up = f(x);
        x[i] = keep - h;
        const double down = f(x);
        x[i] = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// |a - n| / max(|a|, |n|, floor). The floor keeps coordinates whose true
/// gradient is ~0 from turning round-off into a large ratio.
inline double relative_error(double a, double n, double floor = 1e-6) {
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& n) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, relative_error(a[i], n[i]));
    return worst;
}

struct WindowRef {
    std::vector<std::size_t> rows;
    std::size_t target;
};

/// Every (window rows, target row) pair for a series of length n, by enumeration.
inline std::vector<WindowRef> enumerate_windows(std::size_t n, std::size_t L) {
    std::vector<WindowRef> out;
    for (std::size_t t = 0; t < n; ++t) {
        if (t < L) continue;
        WindowRef w;
        for (std::size_t r = t - L; r < t; ++r) w.rows.push_back(r);
        w.target = t;
        out.push_back(w);
    }
    return out;
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double pearson_ref(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = mean_of(x), my = mean_of(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// ---- fixtures --------------------------------------------------------------

/// Fresh empty directory under the build tree, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(std::filesystem::temp_directory_path() / ("gridcast-test-" + name)) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// A frame of `days` whole days with smooth synthetic consumption and
/// weather that varies by day.
inline gridcast::MergedFrame toy_frame(std::size_t days, int year = 2023, unsigned month = 3, unsigned day = 1) {
    using namespace gridcast;
    MergedFrame f;
    const Date start{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    const long long d0 = days_since_epoch(start);
    for (std::size_t d = 0; d < days; ++d) {
        const Date date = date_from_days(d0 + static_cast<long long>(d));
        for (int s = 0; s < kSlotsPerDay; ++s) {
            FrameRow r;
            r.t = TimePoint(date, s / 12, (s % 12) * 5);
            r.consumption_w = 500.0 + 300.0 * std::sin(2.0 * M_PI * s / kSlotsPerDay) + 10.0 * static_cast<double>(d);
            r.weather = {20.0 + static_cast<double>(d % 7), static_cast<double>(d % 3), 15.0 + static_cast<double>(d % 5),
                         60.0 + static_cast<double>(d % 11), 22.0 + static_cast<double>(d % 4),
                         50.0 + static_cast<double>(d % 9)};
            r.time_decimal = time_decimal(r.t);
            f.rows.push_back(r);
        }
    }
    return f;
}

}  // namespace testing
