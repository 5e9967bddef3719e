#pragma once

#include <stdexcept>
#include <string>

namespace canyon {

// Raised when a statistical procedure cannot produce a usable answer
// (degenerate fit input, bracket that never tightened, empty sample).
// Callers that map errors to process exit codes treat this as a distinct
// failure class from precondition violations.
class StatGuardError : public std::runtime_error {
public:
    explicit StatGuardError(const std::string& what) : std::runtime_error(what) {}
};

// Precondition failures throw std::invalid_argument or std::domain_error
// directly; these helpers just keep the call sites one line.
inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline void require_domain(bool cond, const char* msg) {
    if (!cond) throw std::domain_error(msg);
}

}  // namespace canyon
