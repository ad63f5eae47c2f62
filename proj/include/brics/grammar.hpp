#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace brics {

enum class BlockKind { branch, loop, guard, callable, type_decl, conditional_region, generic };

std::string_view to_string(BlockKind kind) noexcept;
std::optional<BlockKind> block_kind_from_string(std::string_view name) noexcept;

struct DelimiterPair {
    std::string open;
    std::string close;

    friend bool operator==(const DelimiterPair&, const DelimiterPair&) = default;
};

struct StringSyntax {
    std::string open;
    std::string close;
    std::string escape; // empty: no escapes

    friend bool operator==(const StringSyntax&, const StringSyntax&) = default;
};

/// Preprocessor-style directive names, e.g. "#ifdef".
struct ConditionalDirectives {
    std::string if_;
    std::string ifdef;
    std::string ifndef;
    std::string else_;
    std::string elif;
    std::string end;

    friend bool operator==(const ConditionalDirectives&, const ConditionalDirectives&) = default;
};

/// Per-language description of what counts as a block.
struct StructureGrammar {
    std::string name;
    std::vector<std::string> extensions;
    std::vector<std::string> line_comments;
    std::vector<DelimiterPair> block_comments;
    std::vector<StringSyntax> strings;
    std::vector<DelimiterPair> blocks;
    std::map<std::string, BlockKind> kinds;
    std::optional<ConditionalDirectives> conditionals;

    // Word lists used by the dependency analysis.
    std::string default_type = "int";
    std::string void_type = "void";
    std::set<std::string> keywords;
    std::set<std::string> primitive_types;
    // Words that continue the previous block statement (else, catch, ...).
    std::set<std::string> continuations;

    bool is_keyword(std::string_view word) const;

    friend bool operator==(const StructureGrammar&, const StructureGrammar&) = default;
};

struct GrammarDiagnostic {
    enum class Severity { error, warning };

    std::string path; // slash separated, e.g. "blocks/0/close"; empty for the whole document
    std::string message;
    Severity severity = Severity::error;
};

struct GrammarLoadResult {
    std::optional<StructureGrammar> grammar; // present iff no error diagnostics
    std::vector<GrammarDiagnostic> diagnostics;

    bool ok() const noexcept { return grammar.has_value(); }
};

GrammarLoadResult load_grammar(std::string_view config_text);

/// Inverse of load_grammar: produces a config document that loads back to `grammar`.
std::string grammar_to_json(const StructureGrammar& grammar);

/// The identifier found by scanning backwards from a block opener.
struct Introducer {
    std::string word;
    bool has_parameters = false; // word was followed by a balanced (...) group
    // A type_decl keyword found further back in a parameterless header,
    // e.g. "class" in `class Foo : Base {`.
    std::string type_keyword;
};

BlockKind classify_block_kind(const StructureGrammar& grammar,
                              const std::optional<Introducer>& introducer);

/// Grammars shipped with the tool (c, java, brace).
const std::vector<StructureGrammar>& builtin_grammars();

/// Looks up a grammar by name among the shipped grammars, then in `extra`.
const StructureGrammar* find_grammar(std::string_view name,
                                     const std::vector<StructureGrammar>& extra = {});

/// Loads every `<name>.grammar.json` in `dir`. Throws Error(grammar) listing the
/// diagnostics of the first file that fails.
std::vector<StructureGrammar> load_grammar_directory(const std::string& dir);

} // namespace brics
