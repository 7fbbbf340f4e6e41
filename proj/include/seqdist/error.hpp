#pragma once

#include <stdexcept>
#include <string>

namespace seqdist {

enum class ErrorCode {
    invalid_spec,
    index_out_of_range,
    resource_limit,
    window_too_long,
    invalid_schedule,
    degenerate_epsilon,
    value_out_of_bounds,
    not_simply_distributed,
    overweight,
    invalid_argument,
    parse_error,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::resource_limit: return "resource-limit";
    case ErrorCode::window_too_long: return "window-too-long";
    case ErrorCode::invalid_schedule: return "invalid-schedule";
    case ErrorCode::degenerate_epsilon: return "degenerate-epsilon";
    case ErrorCode::value_out_of_bounds: return "value-out-of-bounds";
    case ErrorCode::not_simply_distributed: return "not-simply-distributed";
    case ErrorCode::overweight: return "overweight";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::parse_error: return "parse-error";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace seqdist
