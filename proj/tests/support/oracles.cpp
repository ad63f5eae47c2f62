#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

std::u32string decode(const std::string& s) {
    std::u32string out;
    for (std::size_t i = 0; i < s.size();) {
        const auto b = static_cast<unsigned char>(s[i]);
        int extra = b < 0x80 ? 0 : b >= 0xF0 ? 3 : b >= 0xE0 ? 2 : 1;
        char32_t cp = extra == 0 ? b : extra == 1 ? (b & 0x1F) : extra == 2 ? (b & 0x0F) : (b & 0x07);
        if (i + static_cast<std::size_t>(extra) >= s.size() && extra > 0) throw std::runtime_error("truncated UTF-8");
        for (int k = 1; k <= extra; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
        out.push_back(cp);
        i += static_cast<std::size_t>(extra) + 1;
    }
    return out;
}

std::vector<std::u32string> split_lines(const std::u32string& text) {
    std::vector<std::u32string> lines;
    std::u32string cur;
    for (char32_t c : text) {
        if (c == U'\n') {
            if (!cur.empty() && cur.back() == U'\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

namespace {

bool at(const std::u32string& t, std::size_t i, const std::u32string& m) {
    return !m.empty() && i + m.size() <= t.size() && t.compare(i, m.size(), m) == 0;
}

bool ident(char32_t c) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') || c == U'_';
}

std::u32string wide(const std::string& s) { return decode(s); }

} // namespace

brics::CodeMask mask(const std::string& text, const brics::StructureGrammar& g) {
    using brics::CharClass;
    const auto t = decode(text);
    brics::CodeMask m(t.size(), CharClass::code);

    enum class State { code, line_comment, block_comment, string };
    State state = State::code;
    std::u32string close, escape;

    std::size_t i = 0;
    while (i < t.size()) {
        switch (state) {
        case State::code: {
            // Longest opener wins; on equal length line comments, then block
            // comments, then strings.
            std::size_t best = 0;
            int which = -1;
            std::size_t index = 0;
            for (std::size_t k = 0; k < g.line_comments.size(); ++k) {
                auto w = wide(g.line_comments[k]);
                if (at(t, i, w) && w.size() > best) best = w.size(), which = 0, index = k;
            }
            for (std::size_t k = 0; k < g.block_comments.size(); ++k) {
                auto w = wide(g.block_comments[k].open);
                if (at(t, i, w) && w.size() > best) best = w.size(), which = 1, index = k;
            }
            for (std::size_t k = 0; k < g.strings.size(); ++k) {
                auto w = wide(g.strings[k].open);
                if (at(t, i, w) && w.size() > best) best = w.size(), which = 2, index = k;
            }
            if (which < 0) {
                ++i;
                break;
            }
            const CharClass cls = which == 2 ? CharClass::string_literal : CharClass::comment;
            for (std::size_t k = 0; k < best; ++k) m[i + k] = cls;
            i += best;
            if (which == 0) {
                state = State::line_comment;
            } else if (which == 1) {
                state = State::block_comment;
                close = wide(g.block_comments[index].close);
            } else {
                state = State::string;
                close = wide(g.strings[index].close);
                escape = wide(g.strings[index].escape);
            }
            break;
        }
        case State::line_comment:
            if (t[i] == U'\n' || (t[i] == U'\r' && i + 1 < t.size() && t[i + 1] == U'\n')) {
                state = State::code;
            } else {
                m[i++] = CharClass::comment;
            }
            break;
        case State::block_comment:
            if (at(t, i, close)) {
                for (std::size_t k = 0; k < close.size(); ++k) m[i + k] = CharClass::comment;
                i += close.size();
                state = State::code;
            } else {
                m[i++] = CharClass::comment;
            }
            break;
        case State::string:
            if (at(t, i, escape)) {
                const std::size_t stop = std::min(t.size(), i + escape.size() + 1);
                for (; i < stop; ++i) m[i] = CharClass::string_literal;
            } else if (at(t, i, close)) {
                for (std::size_t k = 0; k < close.size(); ++k) m[i + k] = CharClass::string_literal;
                i += close.size();
                state = State::code;
            } else {
                m[i++] = CharClass::string_literal;
            }
            break;
        }
    }
    return m;
}

Parse parse(const std::string& text, const brics::StructureGrammar& g) {
    using brics::DiagnosticCode;
    constexpr char32_t kHidden = 0x1;
    const auto t = decode(text);
    const auto m = mask(text, g);

    Parse out;

    std::u32string s = t;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool terminator = s[i] == U'\n' || (s[i] == U'\r' && i + 1 < s.size() && s[i + 1] == U'\n');
        if (m[i] != brics::CharClass::code && !terminator) s[i] = kHidden;
    }
    const auto lines = split_lines(s);

    struct Open {
        int line, col, delimiter;
        std::size_t span_index;
    };
    std::vector<Span> spans;
    std::vector<Open> stack;

    auto close_top = [&](int line, int col, bool unclosed) {
        auto& sp = spans[stack.back().span_index];
        sp.close_line = line;
        sp.close_col = col;
        sp.unclosed = unclosed;
        if (unclosed) out.diagnostics.insert({sp.open_line, sp.open_col, DiagnosticCode::unclosed_block});
        stack.pop_back();
    };
    auto open = [&](int line, int col, int delimiter) {
        spans.push_back({line, col, 0, 0, static_cast<int>(stack.size()), delimiter, false});
        stack.push_back({line, col, delimiter, spans.size() - 1});
    };

    std::vector<std::pair<std::u32string, int>> directives; // name, 0 open / 1 middle / 2 end
    if (g.conditionals) {
        const auto& c = *g.conditionals;
        directives = {{wide(c.if_), 0}, {wide(c.ifdef), 0}, {wide(c.ifndef), 0},
                      {wide(c.else_), 1}, {wide(c.elif), 1}, {wide(c.end), 2}};
    }

    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto& L = lines[ln];
        const int line = static_cast<int>(ln) + 1;

        std::size_t first = 0;
        while (first < L.size() && (L[first] == U' ' || L[first] == U'\t')) ++first;
        int role = -1;
        std::size_t best = 0;
        for (const auto& [name, r] : directives) {
            if (name.size() <= best || !at(L, first, name)) continue;
            const std::size_t after = first + name.size();
            if (after < L.size() && ident(L[after]) && ident(name.back())) continue;
            role = r;
            best = name.size();
        }
        if (role >= 0) {
            const int col = static_cast<int>(first);
            if (role == 0) {
                open(line, col, -1);
                continue;
            }
            auto region = std::find_if(stack.rbegin(), stack.rend(), [](const Open& o) { return o.delimiter < 0; });
            if (region == stack.rend()) {
                out.diagnostics.insert({line, col, DiagnosticCode::unbalanced_close});
                continue;
            }
            const std::size_t keep = static_cast<std::size_t>(stack.rend() - region) - 1;
            int cl = line, cc = col;
            if (role == 1 && line > 1) {
                cl = line - 1;
                cc = static_cast<int>(lines[ln - 1].size());
            }
            while (stack.size() > keep + 1) close_top(cl, cc, true);
            close_top(cl, cc, false);
            if (role == 1) open(line, col, -1);
            continue;
        }

        for (std::size_t i = 0; i < L.size();) {
            int hit = -1;
            bool is_open = false;
            std::size_t len = 0;
            for (std::size_t k = 0; k < g.blocks.size(); ++k) {
                for (int side = 0; side < 2; ++side) {
                    const auto w = wide(side == 0 ? g.blocks[k].open : g.blocks[k].close);
                    if (w.size() <= len || !at(L, i, w)) continue;
                    if (ident(w.front()) && i > 0 && ident(L[i - 1])) continue;
                    if (ident(w.back()) && i + w.size() < L.size() && ident(L[i + w.size()])) continue;
                    hit = static_cast<int>(k);
                    is_open = side == 0;
                    len = w.size();
                }
            }
            if (hit < 0) {
                ++i;
                continue;
            }
            const int col = static_cast<int>(i);
            if (is_open) {
                open(line, col, hit);
            } else if (!stack.empty() && stack.back().delimiter == hit) {
                close_top(line, col, false);
            } else {
                out.diagnostics.insert({line, col, DiagnosticCode::unbalanced_close});
            }
            i += len;
        }
    }
    const int end_line = lines.empty() ? 1 : static_cast<int>(lines.size());
    const int end_col = lines.empty() ? 0 : static_cast<int>(lines.back().size());
    while (!stack.empty()) close_top(end_line, end_col, true);
    out.spans.insert(spans.begin(), spans.end());
    return out;
}

Parse from_library(const brics::ParseResult& result) {
    Parse p;
    for (const auto& n : result.tree.nodes) {
        p.spans.insert({n.open.line, n.open.col, n.close.line, n.close.col, n.depth, n.delimiter, n.unclosed});
    }
    for (const auto& d : result.diagnostics) {
        if (d.code == brics::DiagnosticCode::unbalanced_close || d.code == brics::DiagnosticCode::unclosed_block) {
            p.diagnostics.insert({d.position.line, d.position.col, d.code});
        }
    }
    return p;
}

std::optional<int> block_at(const brics::BlockTree& tree, brics::Position pos) {
    std::optional<int> best;
    int best_depth = -1;
    for (const auto& n : tree.nodes) {
        const bool after_open = n.open.line < pos.line || (n.open.line == pos.line && n.open.col <= pos.col);
        const bool before_close = pos.line < n.close.line || (pos.line == n.close.line && pos.col <= n.close.col);
        if (after_open && before_close && n.depth > best_depth) {
            best = n.id;
            best_depth = n.depth;
        }
    }
    return best;
}

std::map<int, Rect> rects(const brics::BlockTree& tree, const std::string& text) {
    const auto lines = split_lines(decode(text));
    auto indent_of = [&](int line) -> std::optional<int> {
        const auto& L = lines[static_cast<std::size_t>(line - 1)];
        for (std::size_t i = 0; i < L.size(); ++i) {
            if (L[i] != U' ' && L[i] != U'\t' && L[i] != U'\f' && L[i] != U'\v') return static_cast<int>(i);
        }
        return std::nullopt;
    };
    std::map<int, Rect> out;
    for (const auto& n : tree.nodes) {
        Rect r{n.first_line, n.last_line, 1 << 30, 0};
        bool any = false;
        for (int l = n.first_line; l <= n.last_line; ++l) {
            r.right = std::max(r.right, static_cast<int>(lines[static_cast<std::size_t>(l - 1)].size()) + 1);
            if (auto ind = indent_of(l)) {
                r.left = std::min(r.left, *ind);
                any = true;
            }
        }
        if (!any) r.left = static_cast<int>(lines[static_cast<std::size_t>(n.first_line - 1)].size());
        out[n.id] = r;
    }
    return out;
}

brics::Rgb darken(brics::Rgb c, double d) {
    auto ch = [d](std::uint8_t v) { return static_cast<std::uint8_t>(std::floor(v * (1.0 - d) + 0.5)); };
    return {ch(c.r), ch(c.g), ch(c.b)};
}

} // namespace oracle
