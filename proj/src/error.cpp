#include "mdshap/error.hpp"

namespace mdshap {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::IndexOverlap: return "IndexOverlap";
        case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorCode::InvalidLevel: return "InvalidLevel";
        case ErrorCode::NegativeLambda: return "NegativeLambda";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::SingularSubproblem: return "SingularSubproblem";
        case ErrorCode::DegenerateColumn: return "DegenerateColumn";
        case ErrorCode::InsufficientRows: return "InsufficientRows";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingResults: return "MissingResults";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    }
    return "Unknown";
}

bool is_numeric_failure(ErrorCode code) noexcept {
    return code == ErrorCode::NotPositiveDefinite || code == ErrorCode::SingularSubproblem;
}

}  // namespace mdshap
