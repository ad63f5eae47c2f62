#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace brics {

enum class ErrorCode {
    grammar,         // E_GRAMMAR
    range,           // E_RANGE
    mismatch,        // E_MISMATCH
    expr,            // E_EXPR
    no_method,       // E_NO_METHOD
    multi_output,    // E_MULTI_OUTPUT
    name_taken,      // E_NAME_TAKEN
    invalid_name,    // E_INVALID_NAME
    stale,           // E_STALE
    boundary,        // E_BOUNDARY
    encoding,        // E_ENCODING
    unknown_grammar, // E_UNKNOWN_GRAMMAR
    not_found,       // E_NOT_FOUND
    bad_request,     // E_BAD_REQUEST
};

std::string_view to_string(ErrorCode code) noexcept;

/// Failure raised by the library operations. The code is the machine-readable
/// part and is what the CLI exit codes and HTTP statuses are derived from.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace brics
