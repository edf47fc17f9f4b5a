#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcm {

enum class ErrorKind {
    Domain,             // geometric degeneracy, invalid angle/radius
    Protocol,           // malformed input, colour outside palette, empty activation
    Capability,         // model does not permit the requested read/write
    Precondition,       // algorithm applied to a snapshot it cannot handle
    Constraint,         // generator or config constraint violated
    ScheduleExhausted,  // scripted schedule ran out
    UnreachableState,   // algorithm reached a state its rules do not cover
    Timeout,            // interactive scheduler waited too long
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Protocol: return "protocol error";
    case ErrorKind::Capability: return "capability error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::Constraint: return "constraint error";
    case ErrorKind::ScheduleExhausted: return "schedule exhausted";
    case ErrorKind::UnreachableState: return "unreachable state";
    case ErrorKind::Timeout: return "timeout";
    }
    return "error";
}

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace lcm
