#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mdshap {

enum class ErrorCode {
    DimensionMismatch,
    NonFinite,
    NotSymmetric,
    NotPositiveDefinite,
    IndexOutOfRange,
    IndexOverlap,
    DimensionTooLarge,
    InvalidLevel,
    NegativeLambda,
    InvalidArgument,
    EmptySubset,
    SingularSubproblem,
    DegenerateColumn,
    InsufficientRows,
    ShapeMismatch,
    ParseError,
    MissingResults,
    SchemaVersionMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// Numeric failures (factorization, singular subproblems) map to a different
// CLI exit status than malformed input.
bool is_numeric_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mdshap
