#include "doctest.h"

#include <algorithm>

#include "brics/grammar.hpp"
#include "fixtures.hpp"

using namespace brics;

namespace {

bool has_error(const GrammarLoadResult& r, const std::string& path, const std::string& fragment) {
    return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const GrammarDiagnostic& d) {
        return d.severity == GrammarDiagnostic::Severity::error && d.path == path &&
               d.message.find(fragment) != std::string::npos;
    });
}

} // namespace

TEST_SUITE("grammar") {

TEST_CASE("minimal config loads with one pair, one comment marker and no kinds") {
    auto r = load_grammar(R"({"name": "java", "blocks": [{"open": "{", "close": "}"}], "lineComments": ["//"]})");
    REQUIRE(r.ok());
    StructureGrammar expected;
    expected.name = "java";
    expected.blocks = {{"{", "}"}};
    expected.line_comments = {"//"};
    CHECK(*r.grammar == expected);
    CHECK(r.diagnostics.empty());
    CHECK(classify_block_kind(*r.grammar, Introducer{"if", true, {}}) == BlockKind::callable);
    CHECK(classify_block_kind(*r.grammar, Introducer{"if", false, {}}) == BlockKind::generic);
    CHECK(classify_block_kind(*r.grammar, std::nullopt) == BlockKind::generic);
}

TEST_CASE("a block pair without close is rejected at blocks/0/close") {
    auto r = load_grammar(R"({"name": "x", "blocks": [{"open": "{"}]})");
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, "blocks/0/close", "close"));
}

TEST_CASE("a keyword mapped twice is a duplicate keyword error") {
    auto r = load_grammar(R"({"name": "x", "blocks": [{"open": "{", "close": "}"}],
                              "kinds": {"if": "branch", "if": "loop"}})");
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, "kinds/if", "duplicate keyword"));
}

TEST_CASE("success and failure are exclusive") {
    const char* configs[] = {
        R"({"name": "ok", "blocks": [{"open": "{", "close": "}"}]})",
        R"({"name": "Bad Name", "blocks": [{"open": "{", "close": "}"}]})",
        R"({"name": "x", "blocks": []})",
        R"({"name": "x"})",
        R"({"name": "x", "blocks": [{"open": "", "close": "}"}]})",
        R"({"name": "x", "blocks": [{"open": "{", "close": "}"}], "kinds": {"if": "sometimes"}})",
        R"({"name": "x", "blocks": [{"open": "{", "close": "}"}], "extensions": ["c"]})",
        R"({"name": "x", "blocks": [{"open": "{", "close": "}"}], "conditionals": {"if": "#if"}})",
        R"({"name": "x", "blocks": [{"open": "{", "close": "}"}], "blockComments": [["/*"]]})",
        R"([1, 2])",
        R"({"name": )",
        "{\"name\": \"\xff\"}",
    };
    for (const char* c : configs) {
        CAPTURE(c);
        auto r = load_grammar(c);
        const bool any_error = std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [](const auto& d) {
            return d.severity == GrammarDiagnostic::Severity::error;
        });
        CHECK(r.ok() != any_error);
    }
    CHECK(load_grammar(configs[0]).ok());
    for (std::size_t i = 1; i < std::size(configs); ++i) CHECK_FALSE(load_grammar(configs[i]).ok());
}

TEST_CASE("every failure carries a field path") {
    auto r = load_grammar(R"({"name": "x", "blocks": [{"open": "{", "close": 3}], "strings": [{"open": "'"}]})");
    CHECK(has_error(r, "blocks/0/close", "string"));
    CHECK(has_error(r, "strings/0/close", "missing"));
}

TEST_CASE("unknown fields are warnings only") {
    auto r = load_grammar(R"({"name": "x", "blocks": [{"open": "{", "close": "}"}], "colour": "red"})");
    REQUIRE(r.ok());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].severity == GrammarDiagnostic::Severity::warning);
    CHECK(r.diagnostics[0].path == "colour");
}

TEST_CASE("duplicate top-level field") {
    auto r = load_grammar(R"({"name": "x", "name": "y", "blocks": [{"open": "{", "close": "}"}]})");
    CHECK(has_error(r, "name", "duplicate field"));
}

TEST_CASE("shipped C grammar classifies keywords") {
    const auto& g = fixtures::c();
    CHECK(classify_block_kind(g, Introducer{"if", true, {}}) == BlockKind::branch);
    CHECK(classify_block_kind(g, Introducer{"while", true, {}}) == BlockKind::loop);
    CHECK(classify_block_kind(g, Introducer{"try", false, {}}) == BlockKind::guard);
    CHECK(classify_block_kind(g, Introducer{"main", true, {}}) == BlockKind::callable);
    CHECK(classify_block_kind(g, Introducer{"Point", false, "struct"}) == BlockKind::type_decl);
    CHECK(classify_block_kind(g, Introducer{"x", false, {}}) == BlockKind::generic);
    CHECK(classify_block_kind(g, std::nullopt) == BlockKind::generic);
}

TEST_CASE("shipped grammars round-trip through JSON") {
    for (const auto& g : builtin_grammars()) {
        CAPTURE(g.name);
        auto r = load_grammar(grammar_to_json(g));
        REQUIRE(r.ok());
        CHECK(*r.grammar == g);
        CHECK(r.diagnostics.empty());
    }
    CHECK(builtin_grammars().size() == 3);
    CHECK(find_grammar("c") != nullptr);
    CHECK(find_grammar("java") != nullptr);
    CHECK(find_grammar("brace") != nullptr);
    CHECK(find_grammar("cobol") == nullptr);
}

TEST_CASE("kind names") {
    for (auto k : {BlockKind::branch, BlockKind::loop, BlockKind::guard, BlockKind::callable, BlockKind::type_decl,
                   BlockKind::conditional_region, BlockKind::generic}) {
        CHECK(block_kind_from_string(to_string(k)) == k);
    }
    CHECK_FALSE(block_kind_from_string("sometimes"));
}

}
