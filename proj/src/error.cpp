#include "brics/error.hpp"

namespace brics {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::grammar: return "E_GRAMMAR";
    case ErrorCode::range: return "E_RANGE";
    case ErrorCode::mismatch: return "E_MISMATCH";
    case ErrorCode::expr: return "E_EXPR";
    case ErrorCode::no_method: return "E_NO_METHOD";
    case ErrorCode::multi_output: return "E_MULTI_OUTPUT";
    case ErrorCode::name_taken: return "E_NAME_TAKEN";
    case ErrorCode::invalid_name: return "E_INVALID_NAME";
    case ErrorCode::stale: return "E_STALE";
    case ErrorCode::boundary: return "E_BOUNDARY";
    case ErrorCode::encoding: return "E_ENCODING";
    case ErrorCode::unknown_grammar: return "E_UNKNOWN_GRAMMAR";
    case ErrorCode::not_found: return "E_NOT_FOUND";
    case ErrorCode::bad_request: return "E_BAD_REQUEST";
    }
    return "E_BAD_REQUEST";
}

} // namespace brics
