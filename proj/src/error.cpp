#include "laminaplan/error.hpp"

namespace laminaplan {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidWindow: return "invalid_window";
    case ErrorCode::OutOfBounds: return "out_of_bounds";
    case ErrorCode::ExtentMismatch: return "extent_mismatch";
    case ErrorCode::InvalidSigma: return "invalid_sigma";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::ShapeMismatch: return "shape_mismatch";
    case ErrorCode::InvalidParameter: return "invalid_parameter";
    case ErrorCode::EvenDimsRequired: return "even_dims_required";
    case ErrorCode::LoadError: return "load_error";
    case ErrorCode::NumericError: return "numeric_error";
    case ErrorCode::DegenerateAxis: return "degenerate_axis";
    case ErrorCode::DegeneratePedicle: return "degenerate_pedicle";
    case ErrorCode::Orientation: return "orientation";
    case ErrorCode::DegenerateRegion: return "degenerate_region";
    case ErrorCode::ParamsOutOfBounds: return "params_out_of_bounds";
    case ErrorCode::Io: return "io";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Usage: return "usage";
    }
    return "unknown";
}

} // namespace laminaplan
