#include "brics/gateway/render.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace brics::gateway {

namespace {

void append_xml_escaped(std::string& out, char32_t c) {
    switch (c) {
    case U'&': out += "&amp;"; break;
    case U'<': out += "&lt;"; break;
    case U'>': out += "&gt;"; break;
    case U'"': out += "&quot;"; break;
    case U'\t': out += ' '; break;
    default:
        // Control characters are not allowed in XML 1.0.
        if (c < 0x20 || c == 0xFFFE || c == 0xFFFF) {
            out += "\xEF\xBF\xBD";
        } else {
            utf8::append(out, c);
        }
    }
}

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

std::string render_svg(const std::vector<BlockRect>& rects, const std::vector<FoldSpan>& folds,
                       const SourceText& source, const SvgOptions& opt) {
    const int lines = source.line_count();
    std::vector<bool> hidden(static_cast<std::size_t>(lines) + 2, false);
    std::vector<std::string> placeholder(static_cast<std::size_t>(lines) + 2);
    for (const auto& f : folds) {
        for (int l = std::max(1, f.first_hidden); l <= std::min(lines, f.last_hidden); ++l) {
            hidden[static_cast<std::size_t>(l)] = true;
        }
        if (f.placeholder_line >= 1 && f.placeholder_line <= lines) {
            placeholder[static_cast<std::size_t>(f.placeholder_line)] = f.placeholder;
        }
    }
    // Visual row of each line; hidden lines map to the last visible row before them.
    std::vector<int> row(static_cast<std::size_t>(lines) + 2, -1);
    int rows = 0;
    for (int l = 1; l <= lines; ++l) {
        if (!hidden[static_cast<std::size_t>(l)]) ++rows;
        row[static_cast<std::size_t>(l)] = rows - 1;
    }

    std::vector<const BlockRect*> visible;
    int max_depth = 0;
    for (const auto& r : rects) {
        if (r.top_line < 1 || r.top_line > lines || hidden[static_cast<std::size_t>(r.top_line)]) continue;
        visible.push_back(&r);
        max_depth = std::max(max_depth, r.depth);
    }

    int width = 0;
    for (int l = 1; l <= lines; ++l) width = std::max(width, static_cast<int>(source.line_length(l)) * opt.cell_width);
    int height = rows * opt.cell_height;

    std::string body;
    for (const auto* r : visible) {
        const int level = max_depth - r->depth;
        const int ox = opt.outset_x * level;
        const int oy = opt.outset_y * level;
        const int top_row = row[static_cast<std::size_t>(r->top_line)];
        const int bottom_row = row[static_cast<std::size_t>(std::min(r->bottom_line, lines))];
        const int x = std::max(0, r->left_col * opt.cell_width - ox);
        const int y = std::max(0, top_row * opt.cell_height - oy);
        const int w = (r->right_col - r->left_col) * opt.cell_width + 2 * ox;
        const int h = (bottom_row - top_row + 1) * opt.cell_height + 2 * oy;
        width = std::max(width, x + w);
        height = std::max(height, y + h);
        body += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" + std::to_string(w) +
                "\" height=\"" + std::to_string(h) + "\" fill=\"" + r->fill.hex() + "\" stroke=\"" +
                r->outline.hex() + "\" stroke-width=\"1\" data-block=\"" + std::to_string(r->block_id) +
                "\" data-depth=\"" + std::to_string(r->depth) + "\"" + (r->active ? "" : " data-inactive=\"true\"") +
                "/>\n";
    }
    const auto& chars = source.chars();
    const int baseline = opt.cell_height - opt.cell_height / 4;
    for (int l = 1; l <= lines; ++l) {
        if (hidden[static_cast<std::size_t>(l)]) continue;
        const auto& info = source.line(l);
        body += "<text x=\"0\" y=\"" + std::to_string(row[static_cast<std::size_t>(l)] * opt.cell_height + baseline) +
                "\" data-line=\"" + std::to_string(l) + "\">";
        for (std::size_t i = 0; i < info.length; ++i) append_xml_escaped(body, chars[info.first_char + i]);
        if (const auto& ph = placeholder[static_cast<std::size_t>(l)]; !ph.empty()) {
            body += "<tspan class=\"fold\" fill=\"#808080\"> " + ph + "</tspan>";
        }
        body += "</text>\n";
    }

    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" font-family=\"monospace\" font-size=\"" +
           std::to_string(opt.cell_height * 13 / 16) + "px\" xml:space=\"preserve\">\n";
    out += body;
    out += "</svg>\n";
    return out;
}

std::string render_overview_svg(const OverviewModel& m) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(m.view_width) + "\" height=\"" +
           std::to_string(m.view_height) + "\">\n";
    for (const auto& r : m.rects) {
        out += "<rect x=\"" + fmt_num(r.x) + "\" y=\"" + fmt_num(r.y) + "\" width=\"" + fmt_num(r.w) +
               "\" height=\"" + fmt_num(r.h) + "\" fill=\"" + r.fill.hex() + "\" stroke=\"" + r.outline.hex() +
               "\" stroke-width=\"0.5\" data-block=\"" + std::to_string(r.block_id) + "\"/>\n";
    }
    for (const auto& e : m.error_lines) {
        out += "<line x1=\"0\" y1=\"" + fmt_num(e.y) + "\" x2=\"" + fmt_num(e.width) + "\" y2=\"" + fmt_num(e.y) +
               "\" stroke=\"" + e.color.hex() + "\" stroke-width=\"1\" data-line=\"" + std::to_string(e.line) +
               "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

int ansi_background(const BlockRect& rect) noexcept {
    if (!rect.active) return 250;
    return rect.depth % 2 == 0 ? 255 : 253;
}

std::string render_ansi(const std::vector<BlockRect>& rects, const SourceText& source) {
    const std::string& bytes = source.bytes();
    const auto& chars = source.chars();
    std::string out;
    out.reserve(bytes.size() * 2);
    const int lines = source.line_count();
    for (int l = 1; l <= lines; ++l) {
        const auto& info = source.line(l);
        std::vector<const BlockRect*> covering;
        for (const auto& r : rects) {
            if (r.top_line <= l && l <= r.bottom_line) covering.push_back(&r);
        }
        int current = -1;
        for (std::size_t i = 0; i < info.length; ++i) {
            const int col = static_cast<int>(i);
            int want = -1;
            for (auto it = covering.rbegin(); it != covering.rend(); ++it) {
                if ((*it)->left_col <= col && col < (*it)->right_col) {
                    want = ansi_background(**it);
                    break;
                }
            }
            if (want != current) {
                out += want < 0 ? std::string("\x1b[0m") : "\x1b[48;5;" + std::to_string(want) + "m";
                current = want;
            }
            utf8::append(out, chars[info.first_char + i]);
        }
        out += "\x1b[0m";
        const std::size_t content_end = info.byte_start + info.byte_length;
        const std::size_t next = l < lines ? source.line(l + 1).byte_start : bytes.size();
        out.append(bytes, content_end, next - content_end);
    }
    return out;
}

} // namespace brics::gateway
