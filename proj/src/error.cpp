#include "chaleval/error.hpp"

namespace chaleval {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::io: return "io error";
    case ErrorCode::malformed_header: return "malformed header";
    case ErrorCode::unsupported_datatype: return "unsupported datatype";
    case ErrorCode::non_integer_data: return "non-integer data";
    case ErrorCode::negative_label: return "negative label";
    case ErrorCode::label_not_in_scheme: return "label not in scheme";
    case ErrorCode::grid_mismatch: return "grid mismatch";
    case ErrorCode::unknown_structure: return "unknown structure";
    case ErrorCode::scheme_mismatch: return "scheme mismatch";
    case ErrorCode::empty_ground_truth: return "empty ground truth";
    case ErrorCode::overlapping_masks: return "overlapping masks";
    case ErrorCode::incomplete_table: return "incomplete table";
    case ErrorCode::unknown_scheme: return "unknown scheme";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::invalid_manifest: return "invalid manifest";
    case ErrorCode::phantom_does_not_fit: return "phantom does not fit grid";
    }
    return "error";
}

} // namespace chaleval
