#include "sfflab/error.hpp"

namespace sfflab {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Domain: return "domain";
        case ErrorCode::Precondition: return "precondition";
        case ErrorCode::NonConvergence: return "non-convergence";
        case ErrorCode::Structural: return "structural";
        case ErrorCode::Mismatch: return "mismatch";
        case ErrorCode::NoMinimum: return "no-minimum";
        case ErrorCode::Boundary: return "boundary";
        case ErrorCode::NoRelativeMax: return "no-relative-max";
        case ErrorCode::NeverBelow: return "never-below";
        case ErrorCode::Numerical: return "numerical";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

}  // namespace sfflab
