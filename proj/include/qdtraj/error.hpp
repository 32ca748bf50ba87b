#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdtraj {

enum class ErrorCode {
    invalid_argument,
    non_finite,
    unsupported_joint,
    unsupported_geometry,
    missing_geometry,
    malformed_tree,
    missing_limits,
    out_of_limits,
    invalid_task,
    malformed_document,
    degenerate_volume,
    io_failure,
    grid_too_large,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), _code(code) {}

    ErrorCode code() const noexcept { return _code; }

private:
    ErrorCode _code;
};

} // namespace qdtraj
