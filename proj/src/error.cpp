#include "qdtraj/error.hpp"

namespace qdtraj {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::non_finite: return "non-finite";
    case ErrorCode::unsupported_joint: return "unsupported-joint";
    case ErrorCode::unsupported_geometry: return "unsupported-geometry";
    case ErrorCode::missing_geometry: return "missing-geometry";
    case ErrorCode::malformed_tree: return "malformed-tree";
    case ErrorCode::missing_limits: return "missing-limits";
    case ErrorCode::out_of_limits: return "out-of-limits";
    case ErrorCode::invalid_task: return "invalid-task";
    case ErrorCode::malformed_document: return "malformed-document";
    case ErrorCode::degenerate_volume: return "degenerate-volume";
    case ErrorCode::io_failure: return "io-failure";
    case ErrorCode::grid_too_large: return "grid-too-large";
    }
    return "unknown";
}

} // namespace qdtraj
