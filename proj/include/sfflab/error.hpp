#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfflab {

enum class ErrorCode {
    Domain,          // argument outside the mathematical domain
    Precondition,    // caller violated a documented precondition
    NonConvergence,  // series or iteration did not converge
    Structural,      // internal consistency check failed (e.g. Kramers pairing)
    Mismatch,        // inputs of incompatible shape
    NoMinimum,       // quantity has no minimum (Poisson k = 1)
    Boundary,        // extremum found on the grid boundary
    NoRelativeMax,   // curve without interior relative maximum
    NeverBelow,      // tolerance band never reached
    Numerical,       // eigensolver or fit failure
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorCode::Precondition, what);
}

}  // namespace sfflab
