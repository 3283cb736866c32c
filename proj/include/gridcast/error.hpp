#pragma once

#include <stdexcept>
#include <string>

namespace gridcast {

enum class Errc {
    InvalidArgument,
    Io,
    MissingColumn,
    EmptyFile,
    MalformedTimestamp,
    BoundaryMissing,
    AllMissing,
    EmptyIntersection,
    NoOverlap,
    EmptyInput,
    DimensionMismatch,
    TooFewRows,
    SeriesTooShort,
    ShapeMismatch,
    LengthMismatch,
    NoCachedForward,
    DivergedLoss,
    ZeroVariance,
    ScalerNotFitted,
    InvalidConfig,
    Parse,
};

const char* to_string(Errc code) noexcept;

/// Every fallible operation in the library throws this; code() identifies
/// the failure class so callers can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace gridcast
