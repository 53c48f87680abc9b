#pragma once

#include <stdexcept>
#include <string>

namespace chaleval {

enum class ErrorCode {
    io,
    malformed_header,
    unsupported_datatype,
    non_integer_data,
    negative_label,
    label_not_in_scheme,
    grid_mismatch,
    unknown_structure,
    scheme_mismatch,
    empty_ground_truth,
    overlapping_masks,
    incomplete_table,
    unknown_scheme,
    invalid_argument,
    invalid_manifest,
    phantom_does_not_fit,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a code so callers (CLI exit
/// status, Python exception mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace chaleval
