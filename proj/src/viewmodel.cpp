#include "brics/viewmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "brics/error.hpp"

namespace brics {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

struct LineMetrics {
    int length = 0;
    int indent = 0;
    bool blank = true;
};

std::vector<LineMetrics> measure_lines(const SourceText& source) {
    std::vector<LineMetrics> out(static_cast<std::size_t>(source.line_count()) + 1);
    const auto& chars = source.chars();
    for (int line = 1; line <= source.line_count(); ++line) {
        const auto& info = source.line(line);
        auto& m = out[static_cast<std::size_t>(line)];
        m.length = static_cast<int>(info.length);
        for (std::size_t i = 0; i < info.length; ++i) {
            const char32_t c = chars[info.first_char + i];
            if (c != U' ' && c != U'\t' && c != U'\f' && c != U'\v') {
                m.indent = static_cast<int>(i);
                m.blank = false;
                break;
            }
        }
        if (m.blank) m.indent = m.length;
    }
    return out;
}

} // namespace

Rgb Rgb::from_hex(std::string_view hex) {
    if (hex.size() != 7 || hex[0] != '#') throw Error(ErrorCode::bad_request, "expected #RRGGBB, got '" + std::string(hex) + "'");
    std::uint8_t channels[3];
    for (int k = 0; k < 3; ++k) {
        const int hi = hex_digit(hex[1 + 2 * k]);
        const int lo = hex_digit(hex[2 + 2 * k]);
        if (hi < 0 || lo < 0) throw Error(ErrorCode::bad_request, "expected #RRGGBB, got '" + std::string(hex) + "'");
        channels[k] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return Rgb{channels[0], channels[1], channels[2]};
}

std::string Rgb::hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02X%02X%02X", r, g, b);
    return buf;
}

void Palette::validate() const {
    if (fills[0] == fills[1]) throw Error(ErrorCode::bad_request, "palette fills must differ");
    if (!(outline_darken > 0.0 && outline_darken < 1.0)) {
        throw Error(ErrorCode::bad_request, "outline_darken must lie in (0, 1)");
    }
}

Rgb darken(Rgb color, double fraction) {
    auto scale = [fraction](std::uint8_t c) {
        return static_cast<std::uint8_t>(std::lround(static_cast<double>(c) * (1.0 - fraction)));
    };
    return Rgb{scale(color.r), scale(color.g), scale(color.b)};
}

Shade shade_for_depth(const Palette& palette, int depth) {
    const Rgb fill = palette.fills[static_cast<std::size_t>(depth % 2)];
    return Shade{fill, darken(fill, palette.outline_darken)};
}

std::vector<BlockRect> editor_rects(const BlockTree& tree, const SourceText& source, const Palette& palette,
                                    const ActivityMap* activity) {
    std::vector<BlockRect> rects;
    if (tree.empty()) return rects;
    const auto metrics = measure_lines(source);
    const int line_count = source.line_count();
    rects.reserve(tree.size());
    // Preorder ids already put parents before children.
    for (const auto& node : tree.nodes) {
        if (node.first_line < 1 || node.last_line > line_count || node.first_line > node.last_line) {
            throw Error(ErrorCode::mismatch, "block " + std::to_string(node.id) + " spans lines " +
                                                 std::to_string(node.first_line) + "-" +
                                                 std::to_string(node.last_line) + " but the source has " +
                                                 std::to_string(line_count));
        }
        int left = -1;
        int widest = 0;
        for (int line = node.first_line; line <= node.last_line; ++line) {
            const auto& m = metrics[static_cast<std::size_t>(line)];
            widest = std::max(widest, m.length);
            if (!m.blank) left = left < 0 ? m.indent : std::min(left, m.indent);
        }
        if (left < 0) left = metrics[static_cast<std::size_t>(node.first_line)].indent;

        BlockRect r;
        r.block_id = node.id;
        r.top_line = node.first_line;
        r.bottom_line = node.last_line;
        r.left_col = left;
        r.right_col = widest + 1;
        r.depth = node.depth;
        r.kind = node.kind;
        const auto shade = shade_for_depth(palette, node.depth);
        r.fill = shade.fill;
        r.outline = shade.outline;
        if (activity && node.kind == BlockKind::conditional_region) {
            auto it = activity->active.find(node.id);
            if (it != activity->active.end() && !it->second) {
                r.active = false;
                r.fill = palette.inactive_fill;
                r.outline = darken(palette.inactive_fill, palette.outline_darken);
            }
        }
        rects.push_back(r);
    }
    return rects;
}

OverviewModel overview_model(const BlockTree& tree, const SourceText& source, const OverviewRequest& req,
                             const Palette& palette, const ActivityMap* activity) {
    const int a = req.from_line;
    const int b = req.to_line;
    if (a < 1 || a > b || b > source.line_count()) {
        throw Error(ErrorCode::range, "zoom range [" + std::to_string(a) + ", " + std::to_string(b) +
                                          "] is not within 1.." + std::to_string(source.line_count()));
    }
    if (req.granularity < 0) throw Error(ErrorCode::range, "granularity must be >= 0");
    if (req.view_width <= 0 || req.view_height <= 0) throw Error(ErrorCode::range, "view size must be positive");

    OverviewModel model;
    model.view_width = req.view_width;
    model.view_height = req.view_height;
    model.from_line = a;
    model.to_line = b;
    model.granularity = req.granularity;
    model.error_color = palette.error_color;
    model.doc_lines = b - a + 1;
    int widest = 0;
    for (int line = a; line <= b; ++line) widest = std::max(widest, static_cast<int>(source.line_length(line)));
    // One extra column so the rightmost box edge (1 + longest line) stays inside.
    model.doc_cols = widest + 1;

    // s = min(W / cols, H / lines), compared exactly by cross-multiplication.
    const std::int64_t w = req.view_width;
    const std::int64_t h = req.view_height;
    if (w * model.doc_lines <= h * model.doc_cols) {
        model.scale_num = w;
        model.scale_den = model.doc_cols;
    } else {
        model.scale_num = h;
        model.scale_den = model.doc_lines;
    }
    const std::int64_t g = std::gcd(model.scale_num, model.scale_den);
    model.scale_num /= g;
    model.scale_den /= g;
    model.scale = static_cast<double>(model.scale_num) / static_cast<double>(model.scale_den);

    auto px = [&](int cells) {
        return static_cast<double>(static_cast<std::int64_t>(cells) * model.scale_num) /
               static_cast<double>(model.scale_den);
    };

    for (const auto& r : editor_rects(tree, source, palette, activity)) {
        if (r.depth > req.granularity || r.bottom_line < a || r.top_line > b) continue;
        OverviewRect o;
        o.block_id = r.block_id;
        o.depth = r.depth;
        const int top = std::max(r.top_line, a);
        const int bottom = std::min(r.bottom_line, b);
        o.line = top - a;
        o.lines = bottom - top + 1;
        o.col = std::min(r.left_col, model.doc_cols - 1);
        o.cols = std::max(1, std::min(r.right_col, model.doc_cols) - o.col);
        o.x = px(o.col);
        o.y = px(o.line);
        o.w = px(o.cols);
        o.h = px(o.lines);
        o.fill = r.fill;
        o.outline = r.outline;
        o.active = r.active;
        model.rects.push_back(o);
    }
    return model;
}

OverviewModel mark_errors(OverviewModel model, const std::vector<int>& error_lines) {
    std::set<int> lines;
    for (const auto& e : model.error_lines) lines.insert(e.line);
    for (int line : error_lines) {
        if (line >= model.from_line && line <= model.to_line) lines.insert(line);
    }
    model.error_lines.clear();
    for (int line : lines) {
        ErrorLine e;
        e.line = line;
        e.y = static_cast<double>(static_cast<std::int64_t>(line - model.from_line) * model.scale_num) /
              static_cast<double>(model.scale_den);
        e.width = model.view_width;
        e.color = model.error_color;
        model.error_lines.push_back(e);
    }
    return model;
}

} // namespace brics
