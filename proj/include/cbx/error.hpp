#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbx {

/// Machine-readable failure categories. The wire form (see code_name) is what
/// clients of the service see in the `code` field of error bodies.
enum class ErrorCode {
    InvalidArgument,
    ParseError,
    ValidationFailed,
    NotFound,
    SessionNotFound,
    UnknownInstance,
    UnknownClassifier,
    UnknownFeature,
    UnknownSelection,
    UnknownSample,
    Conflict,
    FrozenClassifier,
    UnsupportedPolicy,
    UndefinedMetric,
    UndefinedCurve,
    EmptyScope,
    EmptyPartition,
    TypeError,
};

std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace cbx
