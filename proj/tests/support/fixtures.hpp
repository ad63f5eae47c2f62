#pragma once

#include <string>

#include "brics/error.hpp"
#include "brics/grammar.hpp"

namespace fixtures {

inline const std::string kSample = "void f() {\n  if (x > 0) {\n    y = 1;\n  }\n}\n";

inline const brics::StructureGrammar& grammar(const char* name) {
    const auto* g = brics::find_grammar(name);
    if (!g) throw std::runtime_error(std::string("missing shipped grammar ") + name);
    return *g;
}

inline const brics::StructureGrammar& c() { return grammar("c"); }

/// Error code thrown by `f`, or nullopt when it does not throw brics::Error.
template <typename F>
std::optional<brics::ErrorCode> error_of(F&& f) {
    try {
        f();
    } catch (const brics::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

} // namespace fixtures
