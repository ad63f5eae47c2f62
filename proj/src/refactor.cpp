#include "brics/refactor.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "brics/error.hpp"

namespace brics {

namespace {

struct Token {
    enum class Kind { word, number, op };
    Kind kind = Kind::op;
    std::string text;
    std::size_t begin = 0; // character index
    std::size_t end = 0;
};

constexpr std::array<std::string_view, 22> kOperators{
    "<<=", ">>=", "==", "!=", "<=", ">=", "++", "--", "+=", "-=", "*=",
    "/=",  "%=",  "&=", "|=", "^=", "&&", "||", "->", "::", "<<", ">>",
};

const std::set<std::string_view> kAssignOps{"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", "++", "--"};

bool is_ident_start(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || c == U'_'; }
bool is_ident_char(char32_t c) { return is_ident_start(c) || (c >= U'0' && c <= U'9'); }
bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v'; }

std::string narrow(std::u32string_view s) {
    std::string out;
    for (char32_t c : s) utf8::append(out, c);
    return out;
}

// Tokens of the code (per mask) in [from, to).
std::vector<Token> lex_code(const SourceText& source, const CodeMask& mask, std::size_t from, std::size_t to) {
    const auto& chars = source.chars();
    std::vector<Token> out;
    std::size_t i = from;
    auto code = [&](std::size_t k) { return k < to && mask[k] == CharClass::code; };
    while (i < to) {
        if (!code(i) || is_space(chars[i])) {
            ++i;
            continue;
        }
        Token t;
        t.begin = i;
        const char32_t c = chars[i];
        if (is_ident_start(c)) {
            t.kind = Token::Kind::word;
            while (code(i) && is_ident_char(chars[i])) ++i;
        } else if (c >= U'0' && c <= U'9') {
            t.kind = Token::Kind::number;
            while (code(i) && (is_ident_char(chars[i]) || chars[i] == U'.')) ++i;
        } else {
            t.kind = Token::Kind::op;
            std::size_t len = 1;
            for (auto op : kOperators) {
                if (i + op.size() > to) continue;
                bool match = true;
                for (std::size_t k = 0; k < op.size() && match; ++k) {
                    match = code(i + k) && chars[i + k] == static_cast<char32_t>(op[k]);
                }
                if (match) {
                    len = op.size();
                    break;
                }
            }
            i += len;
        }
        t.end = i;
        t.text = narrow(std::u32string_view(chars).substr(t.begin, t.end - t.begin));
        out.push_back(std::move(t));
    }
    return out;
}

std::size_t delimiter_end(const SourceText& source, const StructureGrammar& grammar, const BlockNode& node) {
    std::size_t idx = source.index_of(node.close);
    if (node.delimiter >= 0 && !node.unclosed) {
        idx += utf8::decode(grammar.blocks[static_cast<std::size_t>(node.delimiter)].close).size();
    }
    return std::min(idx, source.char_count());
}

int enclosing_callable(const BlockTree& tree, int id) {
    for (int p = tree.at(id).parent; p >= 0; p = tree.at(p).parent) {
        if (tree.at(p).kind == BlockKind::callable) return p;
    }
    return -1;
}

const std::vector<int>& siblings_of(const BlockTree& tree, const BlockNode& node) {
    return node.parent < 0 ? tree.roots : tree.at(node.parent).children;
}

struct Analysis {
    std::vector<Token> tokens;     // whole enclosing method
    std::vector<bool> is_ref;      // variable reference
    std::vector<bool> is_decl;
    std::vector<bool> is_assign;
};

Analysis analyse(const std::vector<Token>& tokens, const StructureGrammar& grammar) {
    Analysis a;
    a.tokens = tokens;
    const std::size_t n = tokens.size();
    a.is_ref.assign(n, false);
    a.is_decl.assign(n, false);
    a.is_assign.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = tokens[i];
        if (t.kind != Token::Kind::word || grammar.is_keyword(t.text)) continue;
        const Token* prev = i > 0 ? &tokens[i - 1] : nullptr;
        const Token* next = i + 1 < n ? &tokens[i + 1] : nullptr;
        if (prev && (prev->text == "." || prev->text == "->" || prev->text == "::")) continue;
        if (next && next->text == "(") continue;
        a.is_ref[i] = true;
        if (prev && prev->kind == Token::Kind::word &&
            (!grammar.is_keyword(prev->text) || grammar.primitive_types.count(prev->text))) {
            a.is_decl[i] = true;
        }
        if ((next && kAssignOps.count(next->text)) || (prev && (prev->text == "++" || prev->text == "--"))) {
            a.is_assign[i] = true;
        }
    }
    return a;
}

struct MethodContext {
    StatementSpan span;
    Analysis analysis;
    std::size_t method_begin = 0;
    std::size_t method_end = 0;
    CodeMask mask;
};

MethodContext method_context(const SourceText& source, const BlockTree& tree, const StructureGrammar& grammar,
                             int block_id) {
    MethodContext ctx;
    ctx.span = statement_span(source, tree, grammar, block_id);
    ctx.mask = scan_mask(source, grammar).mask;
    const auto& method = tree.at(ctx.span.method);
    ctx.method_begin = source.index_of(method.header);
    ctx.method_end = delimiter_end(source, grammar, method);
    ctx.analysis = analyse(lex_code(source, ctx.mask, ctx.method_begin, ctx.method_end), grammar);
    return ctx;
}

DepSets dependencies_of(const MethodContext& ctx) {
    const auto& a = ctx.analysis;
    const auto& tokens = a.tokens;
    std::set<std::string> known_before;
    std::set<std::string> declared_inside;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!a.is_ref[i]) continue;
        if (tokens[i].end <= ctx.span.begin && (a.is_decl[i] || a.is_assign[i])) known_before.insert(tokens[i].text);
        if (tokens[i].begin >= ctx.span.begin && tokens[i].end <= ctx.span.end && a.is_decl[i]) {
            declared_inside.insert(tokens[i].text);
        }
    }
    std::set<std::string> used_after;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (a.is_ref[i] && tokens[i].begin >= ctx.span.end) used_after.insert(tokens[i].text);
    }

    DepSets deps;
    std::set<std::string> seen_in;
    std::set<std::string> seen_out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (!a.is_ref[i] || t.begin < ctx.span.begin || t.end > ctx.span.end) continue;
        if (declared_inside.count(t.text)) continue;
        if (known_before.count(t.text) && seen_in.insert(t.text).second) deps.inputs.push_back(t.text);
        if (a.is_assign[i] && used_after.count(t.text) && seen_out.insert(t.text).second) {
            deps.outputs.push_back(t.text);
        }
    }
    // Keep outputs in order of first occurrence rather than first assignment.
    std::vector<std::string> ordered;
    std::set<std::string> placed;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (!a.is_ref[i] || t.begin < ctx.span.begin || t.end > ctx.span.end) continue;
        if (seen_out.count(t.text) && placed.insert(t.text).second) ordered.push_back(t.text);
    }
    deps.outputs = std::move(ordered);
    return deps;
}

std::string leading_whitespace(std::string_view line) {
    std::size_t k = 0;
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
    return std::string(line.substr(0, k));
}

bool valid_identifier(const std::string& name) {
    if (name.empty() || !is_ident_start(static_cast<unsigned char>(name[0]))) return false;
    return std::all_of(name.begin(), name.end(), [](char c) { return is_ident_char(static_cast<unsigned char>(c)); });
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto nl = text.find('\n', start);
        std::string line = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(std::move(line));
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return out;
}

int line_of_byte(const std::string& text, std::size_t offset) {
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

} // namespace

StatementSpan statement_span(const SourceText& source, const BlockTree& tree, const StructureGrammar& grammar,
                             int block_id) {
    const auto& block = tree.at(block_id);
    if (block.kind == BlockKind::conditional_region) {
        throw Error(ErrorCode::bad_request, "conditional regions cannot be extracted");
    }
    const auto mask = scan_mask(source, grammar).mask;
    const auto code_between = [&](std::size_t from, std::size_t to) {
        return lex_code(source, mask, from, to);
    };

    const auto& siblings = siblings_of(tree, block);
    auto sibling_pos = [&](int id) {
        return static_cast<std::size_t>(std::find(siblings.begin(), siblings.end(), id) - siblings.begin());
    };

    // Walk back over else/catch arms to the head of the chain.
    int head = block_id;
    std::size_t begin = source.index_of(block.header);
    for (;;) {
        const auto pos = sibling_pos(head);
        if (pos == 0) break;
        const auto& prev = tree.at(siblings[pos - 1]);
        if (prev.delimiter < 0) break;
        const auto prev_end = delimiter_end(source, grammar, prev);
        if (prev_end > begin) break;
        const auto between = code_between(prev_end, begin);
        const auto& cur = tree.at(head);
        const bool head_continues = grammar.continuations.count(cur.introducer) > 0;
        const bool word_continues = between.size() == 1 && grammar.continuations.count(between[0].text) > 0;
        if (!((head_continues && between.empty()) || word_continues)) break;
        head = prev.id;
        begin = source.index_of(prev.header);
    }

    // Walk forward over trailing arms and a do-while condition.
    int last = block_id;
    std::size_t end = delimiter_end(source, grammar, block);
    for (;;) {
        const auto& cur = tree.at(last);
        const auto pos = sibling_pos(last);
        const auto after = code_between(end, std::min(source.char_count(), end + 512));
        if (after.empty()) break;
        if (grammar.continuations.count(after[0].text) && pos + 1 < siblings.size()) {
            const auto& next = tree.at(siblings[pos + 1]);
            if (next.delimiter >= 0 && source.index_of(next.header) >= after[0].begin) {
                last = next.id;
                end = delimiter_end(source, grammar, next);
                continue;
            }
        }
        // `do { ... } while (cond);`
        auto kind_of = grammar.kinds.find(after[0].text);
        if (cur.kind == BlockKind::loop && kind_of != grammar.kinds.end() && kind_of->second == BlockKind::loop &&
            after.size() > 1 && after[1].text == "(") {
            int depth = 0;
            for (std::size_t k = 1; k < after.size(); ++k) {
                if (after[k].text == "(") ++depth;
                if (after[k].text == ")" && --depth == 0) {
                    if (k + 1 < after.size() && after[k + 1].text == ";") end = after[k + 1].end;
                    break;
                }
            }
        }
        break;
    }

    const int method = enclosing_callable(tree, head);
    if (method < 0) {
        throw Error(ErrorCode::no_method, "block " + std::to_string(block_id) + " is not inside a method");
    }
    return StatementSpan{begin, end, head, last, method};
}

DepSets block_dependencies(const SourceText& source, const BlockTree& tree, const StructureGrammar& grammar,
                           int block_id) {
    return dependencies_of(method_context(source, tree, grammar, block_id));
}

RefactorResult extract_block(const SourceText& source, const BlockTree& tree, const StructureGrammar& grammar,
                             int block_id, const std::string& new_name) {
    if (!valid_identifier(new_name) || grammar.is_keyword(new_name)) {
        throw Error(ErrorCode::invalid_name, "'" + new_name + "' is not a usable method name");
    }
    const auto ctx = method_context(source, tree, grammar, block_id);

    const auto all = lex_code(source, ctx.mask, 0, source.char_count());
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        if (all[i].text == new_name && all[i + 1].text == "(") {
            throw Error(ErrorCode::name_taken, "a method named '" + new_name + "' already exists");
        }
    }
    for (const auto& n : tree.nodes) {
        if (n.kind == BlockKind::callable && n.introducer == new_name) {
            throw Error(ErrorCode::name_taken, "a method named '" + new_name + "' already exists");
        }
    }

    const DepSets deps = dependencies_of(ctx);
    if (deps.outputs.size() > 1) {
        std::string names;
        for (const auto& o : deps.outputs) names += (names.empty() ? "" : ", ") + o;
        throw Error(ErrorCode::multi_output, "block assigns " + std::to_string(deps.outputs.size()) +
                                                 " variables that are used afterwards: " + names);
    }

    // Declared type of each variable: the word before its first declaration.
    std::map<std::string, std::string> types;
    const auto& a = ctx.analysis;
    for (std::size_t i = 0; i < a.tokens.size(); ++i) {
        if (a.is_decl[i] && i > 0) types.emplace(a.tokens[i].text, a.tokens[i - 1].text);
    }
    auto type_of = [&](const std::string& v) {
        auto it = types.find(v);
        return it == types.end() ? grammar.default_type : it->second;
    };

    const auto& method = tree.at(ctx.span.method);
    const std::string& text = source.bytes();
    const std::string method_indent = leading_whitespace(source.line_bytes(method.header.line));
    std::string unit = "    ";
    for (int line = method.open.line + 1; line < method.close.line; ++line) {
        const auto body = source.line_bytes(line);
        if (body.find_first_not_of(" \t") == std::string_view::npos) continue;
        const auto indent = leading_whitespace(body);
        if (indent.size() > method_indent.size() && indent.compare(0, method_indent.size(), method_indent) == 0) {
            unit = indent.substr(method_indent.size());
        }
        break;
    }
    const std::string body_indent = method_indent + unit;

    // Statement text, re-indented for the new method.
    const std::size_t begin_byte = source.byte_offset(ctx.span.begin);
    const std::size_t end_byte = source.byte_offset(ctx.span.end);
    const Position begin_pos = source.position_of(ctx.span.begin);
    const std::string base_indent = leading_whitespace(source.line_bytes(begin_pos.line));
    std::vector<std::string> body = split_lines(text.substr(begin_byte, end_byte - begin_byte));
    for (std::size_t k = 1; k < body.size(); ++k) {
        auto& line = body[k];
        if (line.compare(0, base_indent.size(), base_indent) == 0) {
            line.erase(0, base_indent.size());
        } else {
            const auto ws = leading_whitespace(line).size();
            line.erase(0, std::min(ws, base_indent.size()));
        }
    }

    std::string args;
    std::string params;
    for (const auto& in : deps.inputs) {
        args += (args.empty() ? "" : ", ") + in;
        params += (params.empty() ? "" : ", ") + type_of(in) + " " + in;
    }
    const std::string call = (deps.outputs.empty() ? "" : deps.outputs[0] + " = ") + new_name + "(" + args + ");";
    const std::string ret = deps.outputs.empty() ? grammar.void_type : type_of(deps.outputs[0]);

    std::string generated = "\n" + method_indent + ret + " " + new_name + "(" + params + ") {\n";
    for (const auto& line : body) generated += (line.empty() ? "" : body_indent + line) + "\n";
    if (!deps.outputs.empty()) generated += body_indent + "return " + deps.outputs[0] + ";\n";
    generated += method_indent + "}\n";

    // Insert after the line holding the method's closer.
    const auto& close_line = source.line(method.close.line);
    std::size_t insert_at = close_line.byte_start + close_line.byte_length;
    std::string prefix_newline;
    if (insert_at < text.size()) {
        insert_at = text.find('\n', insert_at);
        insert_at = insert_at == std::string::npos ? text.size() : insert_at + 1;
    } else {
        prefix_newline = "\n";
    }

    RefactorResult result;
    result.dependencies = deps;
    std::string& out = result.new_source;
    out.reserve(text.size() + generated.size() + call.size());
    out.append(text, 0, begin_byte);
    out += call;
    out.append(text, end_byte, insert_at - end_byte);
    const std::size_t generated_at = out.size() + prefix_newline.size();
    out += prefix_newline;
    out += generated;
    out.append(text, insert_at, std::string::npos);

    result.call_line = line_of_byte(out, begin_byte);
    result.method_first_line = line_of_byte(out, generated_at) + 1; // skip the separating blank line
    result.method_last_line = line_of_byte(out, generated_at + generated.size() - 1);
    return result;
}

std::vector<FoldSpan> fold_spans(const BlockTree& tree, int granularity) {
    std::vector<FoldSpan> out;
    for (const auto& n : tree.nodes) {
        if (n.depth != granularity + 1) continue;
        const int first = n.first_line + 1;
        const int last = n.last_line - 1;
        if (first > last) continue;
        FoldSpan f;
        f.block_id = n.id;
        f.first_hidden = first;
        f.last_hidden = last;
        f.placeholder_line = n.first_line;
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace brics
