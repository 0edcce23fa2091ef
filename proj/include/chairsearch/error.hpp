#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chairsearch {

enum class ErrorCode {
    InvalidInput,
    NotFound,
    Io,
    VersionMismatch,
    ChecksumMismatch,
    DimensionMismatch,
    EmptyIndex,
    ModeViolation,
    QueryInFlight,
    BudgetExceeded,
    NoPendingSelection,
    OutOfRange,
    SessionClosed,
};

/// Stable kebab-case name, used in logs and in the HTTP error payload.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace chairsearch
