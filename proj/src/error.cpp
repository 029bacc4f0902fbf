#include "cbx/error.hpp"

namespace cbx {

std::string_view code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::ParseError: return "PARSE_ERROR";
        case ErrorCode::ValidationFailed: return "VALIDATION_FAILED";
        case ErrorCode::NotFound: return "NOT_FOUND";
        case ErrorCode::SessionNotFound: return "SESSION_NOT_FOUND";
        case ErrorCode::UnknownInstance: return "UNKNOWN_INSTANCE";
        case ErrorCode::UnknownClassifier: return "UNKNOWN_CLASSIFIER";
        case ErrorCode::UnknownFeature: return "UNKNOWN_FEATURE";
        case ErrorCode::UnknownSelection: return "UNKNOWN_SELECTION";
        case ErrorCode::UnknownSample: return "UNKNOWN_SAMPLE";
        case ErrorCode::Conflict: return "CONFLICT";
        case ErrorCode::FrozenClassifier: return "FROZEN_CLASSIFIER";
        case ErrorCode::UnsupportedPolicy: return "UNSUPPORTED_POLICY";
        case ErrorCode::UndefinedMetric: return "UNDEFINED_METRIC";
        case ErrorCode::UndefinedCurve: return "UNDEFINED_CURVE";
        case ErrorCode::EmptyScope: return "EMPTY_SCOPE";
        case ErrorCode::EmptyPartition: return "EMPTY_PARTITION";
        case ErrorCode::TypeError: return "TYPE_ERROR";
    }
    return "UNKNOWN";
}

} // namespace cbx
