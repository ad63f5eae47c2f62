#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brics/grammar.hpp"
#include "brics/source_text.hpp"

namespace brics {

enum class CharClass : std::uint8_t { code, comment, string_literal };

/// One classification per character of the source.
using CodeMask = std::vector<CharClass>;

enum class DiagnosticCode { unbalanced_close, unclosed_block, unterminated_comment, unterminated_string };

std::string_view to_string(DiagnosticCode code) noexcept;

struct ParseDiagnostic {
    Position position;
    std::string message;
    DiagnosticCode code = DiagnosticCode::unbalanced_close;

    friend bool operator==(const ParseDiagnostic&, const ParseDiagnostic&) = default;
};

struct MaskResult {
    CodeMask mask;
    std::vector<ParseDiagnostic> diagnostics;
};

MaskResult scan_mask(const SourceText& source, const StructureGrammar& grammar);

struct BlockNode {
    int id = 0;     // depth-first preorder index
    BlockKind kind = BlockKind::generic;
    Position open;  // first character of the opening delimiter or directive
    Position close; // first character of the closing delimiter, or end of region
    int first_line = 1;
    int last_line = 1;
    int depth = 0;
    int parent = -1; // id of the parent, -1 for roots
    std::vector<int> children;

    // Header word found by the backward scan (or the directive name for a
    // conditional region) and where the header starts. Without an introducer
    // the header starts at the opener.
    std::string introducer;
    Position header;
    int delimiter = -1; // index into grammar.blocks, -1 for conditional regions
    bool unclosed = false;

    friend bool operator==(const BlockNode&, const BlockNode&) = default;
};

/// Blocks in preorder; nodes[i].id == i.
struct BlockTree {
    std::vector<BlockNode> nodes;
    std::vector<int> roots;

    bool empty() const noexcept { return nodes.empty(); }
    std::size_t size() const noexcept { return nodes.size(); }
    const BlockNode& at(int id) const;
    int max_depth() const noexcept; // -1 when empty

    friend bool operator==(const BlockTree&, const BlockTree&) = default;
};

struct ParseResult {
    BlockTree tree;
    std::vector<ParseDiagnostic> diagnostics; // sorted by position

    friend bool operator==(const ParseResult&, const ParseResult&) = default;
};

ParseResult parse_blocks(const SourceText& source, const StructureGrammar& grammar);

/// Deepest block whose [open, close] span contains `pos`, boundaries inclusive.
/// Throws Error(range) when `pos` is outside the document.
std::optional<int> block_at(const BlockTree& tree, const SourceText& source, Position pos);

/// Which directive of `grammar.conditionals` starts `line`, if any.
enum class DirectiveKind { if_, ifdef, ifndef, else_, elif, end };

struct DirectiveLine {
    DirectiveKind kind;
    int col = 0;            // column of the directive token
    std::string argument;   // code text after the directive, comments removed, trimmed
};

std::optional<DirectiveLine> directive_on_line(const SourceText& source, const CodeMask& mask,
                                               const StructureGrammar& grammar, int line);

} // namespace brics
