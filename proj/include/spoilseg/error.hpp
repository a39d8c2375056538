#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spoilseg {

enum class ErrorKind {
    io,
    malformed_header,
    truncated_payload,
    unsupported_maxval,
    missing_key,
    token_count,
    non_numeric,
    label_overflow,
    invalid_argument,
    dimension_mismatch,
    degenerate_input,
    out_of_range,
    instance_too_large,
    placement,
};

constexpr std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::malformed_header: return "malformed_header";
    case ErrorKind::truncated_payload: return "truncated_payload";
    case ErrorKind::unsupported_maxval: return "unsupported_maxval";
    case ErrorKind::missing_key: return "missing_key";
    case ErrorKind::token_count: return "token_count";
    case ErrorKind::non_numeric: return "non_numeric";
    case ErrorKind::label_overflow: return "label_overflow";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::degenerate_input: return "degenerate_input";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::instance_too_large: return "instance_too_large";
    case ErrorKind::placement: return "placement";
    }
    return "unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI's machine-readable error output) can tell failures apart.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace spoilseg
