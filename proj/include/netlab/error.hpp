#pragma once

#include <stdexcept>
#include <string>

namespace netlab {

enum class ErrorCode {
    not_normalized,
    non_zero_mean,
    periodic_or_reducible,
    no_convergence,
    window_too_small,
    out_of_window,
    explosion_cap,
    margin_too_small,
    unreachable_state,
    degenerate_input,
    non_positive_time,
    version_mismatch,
    bad_config,
};

struct Error : std::runtime_error {
    Error(ErrorCode c, const std::string& what) : std::runtime_error(what), code(c) {}
    ErrorCode code;
};

inline const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::not_normalized: return "NotNormalized";
        case ErrorCode::non_zero_mean: return "NonZeroMean";
        case ErrorCode::periodic_or_reducible: return "PeriodicOrReducible";
        case ErrorCode::no_convergence: return "NoConvergence";
        case ErrorCode::window_too_small: return "WindowTooSmall";
        case ErrorCode::out_of_window: return "OutOfWindow";
        case ErrorCode::explosion_cap: return "ExplosionCap";
        case ErrorCode::margin_too_small: return "MarginTooSmall";
        case ErrorCode::unreachable_state: return "UnreachableState";
        case ErrorCode::degenerate_input: return "DegenerateInput";
        case ErrorCode::non_positive_time: return "NonPositiveTime";
        case ErrorCode::version_mismatch: return "VersionMismatch";
        case ErrorCode::bad_config: return "BadConfig";
    }
    return "Error";
}

} // namespace netlab
