#include "sharpld/errors.hpp"

namespace sharpld {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::FellerIndexTooSmall: return "FellerIndexTooSmall";
    case ErrorCode::OutsideSupport: return "OutsideSupport";
    case ErrorCode::MissingPrefactor: return "MissingPrefactor";
    case ErrorCode::UnsupportedMethod: return "UnsupportedMethod";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::NonRealResult: return "NonRealResult";
    case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorCode::UnboundedAbove: return "UnboundedAbove";
    case ErrorCode::IntegrandNotDecaying: return "IntegrandNotDecaying";
    case ErrorCode::NonPositiveSaddle: return "NonPositiveSaddle";
    case ErrorCode::ProbabilityTooSmallForN: return "ProbabilityTooSmallForN";
    case ErrorCode::NonConvergence: return "NonConvergence";
    }
    return "Unknown";
}

} // namespace sharpld
