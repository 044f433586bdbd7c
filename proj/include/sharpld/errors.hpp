#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sharpld {

enum class ErrorCode {
    ParameterOutOfRange,
    FellerIndexTooSmall,
    OutsideSupport,
    MissingPrefactor,
    UnsupportedMethod,
    RootNotBracketed,
    NonRealResult,
    TooCloseToBoundary,
    UnboundedAbove,
    IntegrandNotDecaying,
    NonPositiveSaddle,
    ProbabilityTooSmallForN,
    NonConvergence,
};

std::string_view to_string(ErrorCode code) noexcept;

// Validation errors are caused by the inputs; everything else is a numeric
// failure of an otherwise well-posed request.
constexpr bool is_validation_error(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ParameterOutOfRange:
    case ErrorCode::FellerIndexTooSmall:
    case ErrorCode::OutsideSupport:
    case ErrorCode::MissingPrefactor:
    case ErrorCode::UnsupportedMethod:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sharpld
