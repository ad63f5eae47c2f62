#pragma once

#include <string>
#include <vector>

#include "brics/blockparse.hpp"

namespace brics {

/// Variables flowing into and out of a block, each in order of first
/// occurrence inside the block.
struct DepSets {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    friend bool operator==(const DepSets&, const DepSets&) = default;
};

/// The text a dragged block carries with it: the block plus its header and any
/// chained continuation (else/catch arms, a do-while tail). Character indices,
/// end exclusive.
struct StatementSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    int head_block = 0; // first block of the chain
    int last_block = 0; // last block of the chain
    int method = 0;     // enclosing callable block
};

/// Throws Error(no_method) when the block is not inside a callable block.
StatementSpan statement_span(const SourceText& source, const BlockTree& tree, const StructureGrammar& grammar,
                             int block_id);

/// Lexical dependency analysis for a C-like single-file subset:
///  - a variable reference is a non-keyword identifier in code that is not a
///    member (after `.`, `->`, `::`) and not a call (before `(`);
///  - it is a declaration when the previous token is a non-keyword word or a
///    primitive type;
///  - it is an assignment when followed by `=`, a compound assignment, `++` or
///    `--`, or preceded by `++`/`--`.
/// inputs: referenced in the statement, not declared there, and declared or
/// assigned before it in the enclosing method (parameters included).
/// outputs: assigned in the statement, not declared there, and referenced after
/// it in the enclosing method.
DepSets block_dependencies(const SourceText& source, const BlockTree& tree, const StructureGrammar& grammar,
                           int block_id);

struct RefactorResult {
    std::string new_source;
    int method_first_line = 0; // generated method, 1-based inclusive
    int method_last_line = 0;
    int call_line = 0;
    DepSets dependencies;
};

/// Moves the block into a new method placed right after its enclosing method
/// and replaces it with a call. Throws Error with multi_output, name_taken,
/// invalid_name or no_method.
RefactorResult extract_block(const SourceText& source, const BlockTree& tree, const StructureGrammar& grammar,
                             int block_id, const std::string& new_name);

inline constexpr std::string_view kFoldPlaceholder = "⟨…⟩";

struct FoldSpan {
    int block_id = 0;
    int first_hidden = 0; // opener line + 1
    int last_hidden = 0;  // closer line - 1
    int placeholder_line = 0;
    std::string placeholder{kFoldPlaceholder};

    friend bool operator==(const FoldSpan&, const FoldSpan&) = default;
};

/// Collapses every block one level below the granularity: blocks at depth g+1
/// keep their opener and closer lines visible and hide the lines between.
std::vector<FoldSpan> fold_spans(const BlockTree& tree, int granularity);

} // namespace brics
