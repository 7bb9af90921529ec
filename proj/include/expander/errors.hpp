#pragma once

#include <stdexcept>
#include <string>

namespace expander {

// Failure categories surfaced across module boundaries.  The CLI maps every
// one of these to a JSON error document on stderr and exit code 1 (usage
// errors exit 2).
enum class ErrKind {
    usage,                   // bad arguments / config
    domain,                  // argument outside an operation's precondition
    out_of_range,            // query outside the integrated window
    integration_failure,     // step controller stalled; detail = last good s
    numeric_blowup,          // non-finite state encountered
    not_yet_asymptotic,      // tail not yet in the asymptotic regime
    tail_bound_unavailable,  // |x| not increasing near the window edge
    window,                  // requested window exceeds the integrated one
    degenerate_domain,       // region of integration is empty
    dependency,              // input artifact unfit for the request
    solver,                  // eigen-solver failed to converge
    io,                      // file read/write failure
};

inline const char* err_kind_name(ErrKind k) {
    switch (k) {
        case ErrKind::usage: return "usage";
        case ErrKind::domain: return "domain";
        case ErrKind::out_of_range: return "out_of_range";
        case ErrKind::integration_failure: return "integration_failure";
        case ErrKind::numeric_blowup: return "numeric_blowup";
        case ErrKind::not_yet_asymptotic: return "not_yet_asymptotic";
        case ErrKind::tail_bound_unavailable: return "tail_bound_unavailable";
        case ErrKind::window: return "window";
        case ErrKind::degenerate_domain: return "degenerate_domain";
        case ErrKind::dependency: return "dependency";
        case ErrKind::solver: return "solver";
        case ErrKind::io: return "io";
    }
    return "unknown";
}

struct Error : std::runtime_error {
    ErrKind kind;
    double detail;  // kind-specific payload (last good s, trigger value, ...)

    Error(ErrKind k, const std::string& msg, double detail_value = 0.0)
        : std::runtime_error(msg), kind(k), detail(detail_value) {}
};

[[noreturn]] inline void fail(ErrKind k, const std::string& msg, double detail = 0.0) {
    throw Error(k, msg, detail);
}

}  // namespace expander
