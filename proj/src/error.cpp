#include "gridcast/error.hpp"

namespace gridcast {

const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::Io: return "Io";
        case Errc::MissingColumn: return "MissingColumn";
        case Errc::EmptyFile: return "EmptyFile";
        case Errc::MalformedTimestamp: return "MalformedTimestamp";
        case Errc::BoundaryMissing: return "BoundaryMissing";
        case Errc::AllMissing: return "AllMissing";
        case Errc::EmptyIntersection: return "EmptyIntersection";
        case Errc::NoOverlap: return "NoOverlap";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::TooFewRows: return "TooFewRows";
        case Errc::SeriesTooShort: return "SeriesTooShort";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::NoCachedForward: return "NoCachedForward";
        case Errc::DivergedLoss: return "DivergedLoss";
        case Errc::ZeroVariance: return "ZeroVariance";
        case Errc::ScalerNotFitted: return "ScalerNotFitted";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::Parse: return "Parse";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace gridcast
