#include "brics/blockparse.hpp"

#include <algorithm>

#include "brics/error.hpp"

namespace brics {

namespace {

bool is_ident_char(char32_t c) noexcept {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') || c == U'_';
}

bool is_blank(char32_t c) noexcept { return c == U' ' || c == U'\t' || c == U'\r' || c == U'\n' || c == U'\f' || c == U'\v'; }

bool starts_with_at(const std::u32string& text, std::size_t i, const std::u32string& marker) noexcept {
    return i + marker.size() <= text.size() && text.compare(i, marker.size(), marker) == 0;
}

std::u32string widen(std::string_view s) { return utf8::decode(s); }

std::string narrow(std::u32string_view s) {
    std::string out;
    for (char32_t c : s) utf8::append(out, c);
    return out;
}

struct LexMarker {
    enum class Type { line_comment, block_comment, string };
    Type type;
    std::u32string open;
    std::u32string close;
    std::u32string escape;
};

struct DelimiterMarker {
    std::u32string text;
    bool is_open = true;
    int pair = 0;
};

// Scanner for block delimiters and headers over an already masked text.
class BlockScanner {
public:
    BlockScanner(const SourceText& source, const StructureGrammar& grammar, const CodeMask& mask)
        : src_(source), grammar_(grammar), mask_(mask), chars_(source.chars()) {
        for (std::size_t k = 0; k < grammar.blocks.size(); ++k) {
            markers_.push_back({widen(grammar.blocks[k].open), true, static_cast<int>(k)});
            markers_.push_back({widen(grammar.blocks[k].close), false, static_cast<int>(k)});
        }
        std::stable_sort(markers_.begin(), markers_.end(), [](const auto& a, const auto& b) {
            return a.text.size() > b.text.size();
        });
    }

    ParseResult run(std::vector<ParseDiagnostic> diagnostics) {
        diags_ = std::move(diagnostics);
        for (int line = 1; line <= src_.line_count(); ++line) {
            if (auto d = directive_on_line(src_, mask_, grammar_, line)) {
                handle_directive(line, *d);
                continue;
            }
            const auto& info = src_.line(line);
            const std::size_t end = info.first_char + info.length;
            for (std::size_t i = info.first_char; i < end; ++i) {
                if (mask_[i] != CharClass::code) continue;
                const DelimiterMarker* m = match_delimiter(i, end);
                if (!m) continue;
                const Position pos{line, static_cast<int>(i - info.first_char)};
                if (m->is_open) {
                    open_delimiter(i, pos, m->pair);
                } else {
                    close_delimiter(pos, m->pair);
                }
                i += m->text.size() - 1;
            }
        }
        const Position eof = src_.end_position();
        while (!stack_.empty()) {
            auto& node = temp_[static_cast<std::size_t>(stack_.back())];
            const std::string what = node.delimiter >= 0
                                         ? "'" + grammar_.blocks[static_cast<std::size_t>(node.delimiter)].open + "'"
                                         : "'" + node.introducer + "'";
            diags_.push_back({node.open, what + " is never closed", DiagnosticCode::unclosed_block});
            node.unclosed = true;
            close_top(eof);
        }
        return finish();
    }

private:
    const DelimiterMarker* match_delimiter(std::size_t i, std::size_t line_end) const {
        for (const auto& m : markers_) {
            if (i + m.text.size() > line_end || !starts_with_at(chars_, i, m.text)) continue;
            bool all_code = true;
            for (std::size_t k = 0; k < m.text.size(); ++k) {
                if (mask_[i + k] != CharClass::code) {
                    all_code = false;
                    break;
                }
            }
            if (!all_code) continue;
            // Word-like delimiters ("begin"/"end") only match whole words.
            if (is_ident_char(m.text.front()) && i > 0 && is_ident_char(chars_[i - 1])) continue;
            const std::size_t after = i + m.text.size();
            if (is_ident_char(m.text.back()) && after < chars_.size() && is_ident_char(chars_[after])) continue;
            return &m;
        }
        return nullptr;
    }

    bool skippable(std::ptrdiff_t j) const {
        const auto idx = static_cast<std::size_t>(j);
        return mask_[idx] != CharClass::code || is_blank(chars_[idx]);
    }

    // Skip whitespace, one balanced (...) group, and take the identifier before it.
    std::pair<std::optional<Introducer>, std::size_t> scan_header(std::size_t opener) const {
        constexpr std::ptrdiff_t kMaxScan = 4096;
        std::ptrdiff_t j = static_cast<std::ptrdiff_t>(opener) - 1;
        const std::ptrdiff_t floor = std::max<std::ptrdiff_t>(-1, j - kMaxScan);
        auto skip = [&] {
            while (j > floor && skippable(j)) --j;
        };
        skip();
        bool has_parens = false;
        if (j > floor && chars_[static_cast<std::size_t>(j)] == U')') {
            int depth = 0;
            for (; j > floor; --j) {
                const auto idx = static_cast<std::size_t>(j);
                if (mask_[idx] != CharClass::code) continue;
                if (chars_[idx] == U')') ++depth;
                if (chars_[idx] == U'(' && --depth == 0) break;
            }
            if (j <= floor) return {std::nullopt, opener};
            --j;
            has_parens = true;
            skip();
        }
        if (j <= floor || !is_ident_char(chars_[static_cast<std::size_t>(j)])) return {std::nullopt, opener};
        const std::ptrdiff_t word_end = j;
        while (j > floor && mask_[static_cast<std::size_t>(j)] == CharClass::code &&
               is_ident_char(chars_[static_cast<std::size_t>(j)])) {
            --j;
        }
        const auto word_start = static_cast<std::size_t>(j + 1);
        if (chars_[word_start] >= U'0' && chars_[word_start] <= U'9') return {std::nullopt, opener};

        Introducer intro;
        intro.word = narrow(std::u32string_view(chars_).substr(word_start, static_cast<std::size_t>(word_end) - word_start + 1));
        intro.has_parameters = has_parens;
        std::size_t header = word_start;

        if (!has_parens && !grammar_.kinds.count(intro.word)) {
            // Look further back through the declaration header for a type keyword.
            for (int words = 0; j > floor && words < 16;) {
                const auto idx = static_cast<std::size_t>(j);
                const char32_t c = chars_[idx];
                if (skippable(j) || c == U',' || c == U'.' || c == U':' || c == U'<' || c == U'>' || c == U'*' ||
                    c == U'&') {
                    --j;
                    continue;
                }
                if (!is_ident_char(c)) break;
                const std::ptrdiff_t end = j;
                while (j > floor && mask_[static_cast<std::size_t>(j)] == CharClass::code &&
                       is_ident_char(chars_[static_cast<std::size_t>(j)])) {
                    --j;
                }
                const auto start = static_cast<std::size_t>(j + 1);
                auto word = narrow(std::u32string_view(chars_).substr(start, static_cast<std::size_t>(end) - start + 1));
                auto it = grammar_.kinds.find(word);
                if (it != grammar_.kinds.end()) {
                    if (it->second == BlockKind::type_decl) {
                        intro.type_keyword = word;
                        header = start;
                    }
                    break;
                }
                ++words;
            }
        }
        return {intro, header};
    }

    int push(BlockNode node) {
        const int idx = static_cast<int>(temp_.size());
        node.parent = stack_.empty() ? -1 : stack_.back();
        if (node.parent >= 0) temp_[static_cast<std::size_t>(node.parent)].children.push_back(idx);
        node.first_line = node.open.line;
        temp_.push_back(std::move(node));
        stack_.push_back(idx);
        return idx;
    }

    void close_top(Position close) {
        auto& node = temp_[static_cast<std::size_t>(stack_.back())];
        node.close = close;
        node.last_line = close.line;
        stack_.pop_back();
    }

    void open_delimiter(std::size_t index, Position pos, int pair) {
        auto [intro, header] = scan_header(index);
        BlockNode node;
        node.kind = classify_block_kind(grammar_, intro);
        node.open = pos;
        node.delimiter = pair;
        node.header = src_.position_of(header);
        if (intro) node.introducer = intro->word;
        push(std::move(node));
    }

    void close_delimiter(Position pos, int pair) {
        if (!stack_.empty() && temp_[static_cast<std::size_t>(stack_.back())].delimiter == pair) {
            close_top(pos);
            return;
        }
        diags_.push_back({pos, "unmatched '" + grammar_.blocks[static_cast<std::size_t>(pair)].close + "'",
                          DiagnosticCode::unbalanced_close});
    }

    // Closes everything above the innermost conditional region, then the region
    // itself. Returns false when no region is open.
    bool close_region(Position close, const std::string& directive, Position at) {
        auto it = std::find_if(stack_.rbegin(), stack_.rend(), [&](int idx) {
            return temp_[static_cast<std::size_t>(idx)].delimiter < 0;
        });
        if (it == stack_.rend()) {
            diags_.push_back({at, "'" + directive + "' without an open conditional", DiagnosticCode::unbalanced_close});
            return false;
        }
        const int region = *it;
        while (stack_.back() != region) {
            auto& node = temp_[static_cast<std::size_t>(stack_.back())];
            diags_.push_back({node.open,
                              "'" + grammar_.blocks[static_cast<std::size_t>(node.delimiter)].open +
                                  "' is not closed before '" + directive + "'",
                              DiagnosticCode::unclosed_block});
            node.unclosed = true;
            close_top(close);
        }
        close_top(close);
        return true;
    }

    void handle_directive(int line, const DirectiveLine& d) {
        const Position pos{line, d.col};
        const auto& names = *grammar_.conditionals;
        auto open_region = [&](const std::string& name) {
            BlockNode node;
            node.kind = BlockKind::conditional_region;
            node.open = pos;
            node.header = pos;
            node.introducer = name;
            push(std::move(node));
        };
        switch (d.kind) {
        case DirectiveKind::if_:
            open_region(names.if_);
            break;
        case DirectiveKind::ifdef:
            open_region(names.ifdef);
            break;
        case DirectiveKind::ifndef:
            open_region(names.ifndef);
            break;
        case DirectiveKind::else_:
        case DirectiveKind::elif: {
            const auto& name = d.kind == DirectiveKind::else_ ? names.else_ : names.elif;
            // The region ends with the line before the continuing directive.
            const Position prev_end =
                line > 1 ? Position{line - 1, static_cast<int>(src_.line_length(line - 1))} : pos;
            if (close_region(prev_end, name, pos)) open_region(name);
            break;
        }
        case DirectiveKind::end:
            close_region(pos, names.end, pos);
            break;
        }
    }

    ParseResult finish() {
        ParseResult result;
        std::vector<int> new_id(temp_.size(), -1);
        std::vector<int> order;
        order.reserve(temp_.size());
        std::vector<int> roots;
        for (std::size_t i = 0; i < temp_.size(); ++i) {
            if (temp_[i].parent < 0) roots.push_back(static_cast<int>(i));
        }
        // Iterative preorder walk.
        std::vector<int> work(roots.rbegin(), roots.rend());
        while (!work.empty()) {
            const int idx = work.back();
            work.pop_back();
            new_id[static_cast<std::size_t>(idx)] = static_cast<int>(order.size());
            order.push_back(idx);
            const auto& kids = temp_[static_cast<std::size_t>(idx)].children;
            for (auto it = kids.rbegin(); it != kids.rend(); ++it) work.push_back(*it);
        }
        auto& nodes = result.tree.nodes;
        nodes.reserve(order.size());
        for (int idx : order) {
            BlockNode node = std::move(temp_[static_cast<std::size_t>(idx)]);
            node.id = new_id[static_cast<std::size_t>(idx)];
            if (node.parent >= 0) {
                node.parent = new_id[static_cast<std::size_t>(node.parent)];
                node.depth = nodes[static_cast<std::size_t>(node.parent)].depth + 1;
            } else {
                node.depth = 0;
                result.tree.roots.push_back(node.id);
            }
            for (auto& c : node.children) c = new_id[static_cast<std::size_t>(c)];
            nodes.push_back(std::move(node));
        }
        std::stable_sort(diags_.begin(), diags_.end(), [](const auto& a, const auto& b) {
            return a.position < b.position;
        });
        result.diagnostics = std::move(diags_);
        return result;
    }

    const SourceText& src_;
    const StructureGrammar& grammar_;
    const CodeMask& mask_;
    const std::u32string& chars_;
    std::vector<DelimiterMarker> markers_;
    std::vector<BlockNode> temp_;
    std::vector<int> stack_;
    std::vector<ParseDiagnostic> diags_;
};

} // namespace

std::string_view to_string(DiagnosticCode code) noexcept {
    switch (code) {
    case DiagnosticCode::unbalanced_close: return "UNBALANCED_CLOSE";
    case DiagnosticCode::unclosed_block: return "UNCLOSED_BLOCK";
    case DiagnosticCode::unterminated_comment: return "UNTERMINATED_COMMENT";
    case DiagnosticCode::unterminated_string: return "UNTERMINATED_STRING";
    }
    return "UNBALANCED_CLOSE";
}

MaskResult scan_mask(const SourceText& source, const StructureGrammar& grammar) {
    const auto& chars = source.chars();
    const std::size_t n = chars.size();
    MaskResult result;
    result.mask.assign(n, CharClass::code);
    auto& mask = result.mask;

    std::vector<LexMarker> markers;
    for (const auto& lc : grammar.line_comments) markers.push_back({LexMarker::Type::line_comment, widen(lc), {}, {}});
    for (const auto& bc : grammar.block_comments) {
        markers.push_back({LexMarker::Type::block_comment, widen(bc.open), widen(bc.close), {}});
    }
    for (const auto& s : grammar.strings) {
        markers.push_back({LexMarker::Type::string, widen(s.open), widen(s.close), widen(s.escape)});
    }
    std::stable_sort(markers.begin(), markers.end(), [](const auto& a, const auto& b) {
        return a.open.size() > b.open.size();
    });

    auto fill = [&](std::size_t from, std::size_t to, CharClass c) {
        std::fill(mask.begin() + static_cast<std::ptrdiff_t>(from), mask.begin() + static_cast<std::ptrdiff_t>(to), c);
    };

    std::size_t i = 0;
    while (i < n) {
        const LexMarker* hit = nullptr;
        for (const auto& m : markers) {
            if (starts_with_at(chars, i, m.open)) {
                hit = &m;
                break;
            }
        }
        if (!hit) {
            ++i;
            continue;
        }
        switch (hit->type) {
        case LexMarker::Type::line_comment: {
            std::size_t j = i;
            while (j < n && chars[j] != U'\n') ++j;
            if (j > i && j < n && chars[j - 1] == U'\r') --j;
            fill(i, j, CharClass::comment);
            i = j;
            break;
        }
        case LexMarker::Type::block_comment: {
            const auto close = chars.find(hit->close, i + hit->open.size());
            if (close == std::u32string::npos) {
                fill(i, n, CharClass::comment);
                result.diagnostics.push_back({source.position_of(i), "comment is never closed",
                                              DiagnosticCode::unterminated_comment});
                i = n;
            } else {
                const std::size_t end = close + hit->close.size();
                fill(i, end, CharClass::comment);
                i = end;
            }
            break;
        }
        case LexMarker::Type::string: {
            std::size_t j = i + hit->open.size();
            bool closed = false;
            while (j < n) {
                if (!hit->escape.empty() && starts_with_at(chars, j, hit->escape)) {
                    j = std::min(n, j + hit->escape.size() + 1);
                    continue;
                }
                if (starts_with_at(chars, j, hit->close)) {
                    j += hit->close.size();
                    closed = true;
                    break;
                }
                ++j;
            }
            fill(i, j, CharClass::string_literal);
            if (!closed) {
                result.diagnostics.push_back({source.position_of(i), "string is never closed",
                                              DiagnosticCode::unterminated_string});
            }
            i = j;
            break;
        }
        }
    }
    return result;
}

std::optional<DirectiveLine> directive_on_line(const SourceText& source, const CodeMask& mask,
                                               const StructureGrammar& grammar, int line) {
    if (!grammar.conditionals) return std::nullopt;
    const auto& chars = source.chars();
    const auto& info = source.line(line);
    const std::size_t end = info.first_char + info.length;
    std::size_t i = info.first_char;
    while (i < end && (chars[i] == U' ' || chars[i] == U'\t')) ++i;
    if (i >= end || mask[i] != CharClass::code) return std::nullopt;

    const auto& c = *grammar.conditionals;
    const std::pair<const std::string*, DirectiveKind> names[] = {
        {&c.if_, DirectiveKind::if_},     {&c.ifdef, DirectiveKind::ifdef}, {&c.ifndef, DirectiveKind::ifndef},
        {&c.else_, DirectiveKind::else_}, {&c.elif, DirectiveKind::elif},   {&c.end, DirectiveKind::end},
    };
    std::optional<DirectiveKind> best;
    std::size_t best_len = 0;
    for (const auto& [name, kind] : names) {
        const auto wide = widen(*name);
        if (wide.size() <= best_len || i + wide.size() > end || !starts_with_at(chars, i, wide)) continue;
        const std::size_t after = i + wide.size();
        if (after < end && is_ident_char(chars[after]) && is_ident_char(wide.back())) continue;
        best = kind;
        best_len = wide.size();
    }
    if (!best) return std::nullopt;
    for (std::size_t k = i; k < i + best_len; ++k) {
        if (mask[k] != CharClass::code) return std::nullopt;
    }

    std::u32string arg;
    for (std::size_t k = i + best_len; k < end; ++k) arg.push_back(mask[k] == CharClass::code ? chars[k] : U' ');
    const auto first = arg.find_first_not_of(U" \t\r");
    const auto last = arg.find_last_not_of(U" \t\r");
    DirectiveLine out{*best, static_cast<int>(i - info.first_char), {}};
    if (first != std::u32string::npos) out.argument = narrow(std::u32string_view(arg).substr(first, last - first + 1));
    return out;
}

const BlockNode& BlockTree::at(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes.size()) {
        throw Error(ErrorCode::not_found, "no block with id " + std::to_string(id));
    }
    return nodes[static_cast<std::size_t>(id)];
}

int BlockTree::max_depth() const noexcept {
    int d = -1;
    for (const auto& n : nodes) d = std::max(d, n.depth);
    return d;
}

ParseResult parse_blocks(const SourceText& source, const StructureGrammar& grammar) {
    auto masked = scan_mask(source, grammar);
    BlockScanner scanner(source, grammar, masked.mask);
    return scanner.run(std::move(masked.diagnostics));
}

std::optional<int> block_at(const BlockTree& tree, const SourceText& source, Position pos) {
    if (!source.contains(pos)) {
        throw Error(ErrorCode::range, "position " + std::to_string(pos.line) + ":" + std::to_string(pos.col) +
                                          " is outside the document");
    }
    std::optional<int> found;
    const std::vector<int>* level = &tree.roots;
    for (;;) {
        const BlockNode* next = nullptr;
        for (int id : *level) {
            const auto& n = tree.nodes[static_cast<std::size_t>(id)];
            if (n.open > pos) break;
            if (pos <= n.close) {
                next = &n;
                break;
            }
        }
        if (!next) return found;
        found = next->id;
        level = &next->children;
    }
}

} // namespace brics
