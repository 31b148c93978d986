#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace laminaplan {

/// Machine-readable failure categories. The CLI reports these verbatim.
enum class ErrorCode {
    InvalidWindow,
    OutOfBounds,
    ExtentMismatch,
    InvalidSigma,
    EmptyInput,
    ShapeMismatch,
    InvalidParameter,
    EvenDimsRequired,
    LoadError,
    NumericError,
    DegenerateAxis,
    DegeneratePedicle,
    Orientation,
    DegenerateRegion,
    ParamsOutOfBounds,
    Io,
    Schema,
    Usage,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every library failure.
///
/// `context` names the offending file, field, or layer when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string context = {})
        : std::runtime_error(message), code_(code), context_(std::move(context)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& context() const noexcept { return context_; }

private:
    ErrorCode code_;
    std::string context_;
};

} // namespace laminaplan
