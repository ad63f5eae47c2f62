#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "brics/blockparse.hpp"

namespace brics {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    /// Parses "#RRGGBB" (case-insensitive). Throws Error(bad_request) otherwise.
    static Rgb from_hex(std::string_view hex);
    std::string hex() const; // "#RRGGBB", uppercase

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Palette {
    std::array<Rgb, 2> fills{Rgb{0xF5, 0xF5, 0xF5}, Rgb{0xE8, 0xE8, 0xE8}};
    double outline_darken = 0.12;
    Rgb inactive_fill{0xD0, 0xD0, 0xD0};
    Rgb error_color{0xCC, 0x00, 0x00};

    /// Throws Error(bad_request) unless the fills differ and 0 < outline_darken < 1.
    void validate() const;
};

struct Shade {
    Rgb fill;
    Rgb outline;
};

/// fill = fills[depth mod 2]; outline = each channel scaled by (1 - outline_darken), rounded.
Shade shade_for_depth(const Palette& palette, int depth);
Rgb darken(Rgb color, double fraction);

/// conditional_region block id -> compiled in?
struct ActivityMap {
    std::map<int, bool> active;

    struct ExprError {
        int block_id;
        std::string message;
    };
    std::vector<ExprError> errors;
};

/// Box around one block in character-grid units.
struct BlockRect {
    int block_id = 0;
    int top_line = 1;    // inclusive
    int bottom_line = 1; // inclusive
    int left_col = 0;
    int right_col = 1;   // exclusive
    int depth = 0;
    BlockKind kind = BlockKind::generic;
    Rgb fill;
    Rgb outline;
    bool active = true;

    friend bool operator==(const BlockRect&, const BlockRect&) = default;
};

/// Parents come before their children. `activity`, when given, marks inactive
/// conditional regions and paints them with the inactive fill.
/// Throws Error(mismatch) when the tree refers to lines the source does not have.
std::vector<BlockRect> editor_rects(const BlockTree& tree, const SourceText& source, const Palette& palette,
                                    const ActivityMap* activity = nullptr);

struct OverviewRect {
    int block_id = 0;
    int depth = 0;
    // Clipped character-grid extent relative to the zoom window.
    int col = 0;
    int line = 0; // 0 = first zoomed line
    int cols = 0;
    int lines = 0;
    // Pixel geometry: grid extent times the model's single scale.
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;
    Rgb fill;
    Rgb outline;
    bool active = true;
};

struct ErrorLine {
    int line = 0; // 1-based source line
    double y = 0;
    double width = 0;
    Rgb color;
};

struct OverviewModel {
    // Pixels per character cell, identical on both axes. Kept as the exact
    // fraction scale_num / scale_den as well as its double value.
    double scale = 0;
    std::int64_t scale_num = 0;
    std::int64_t scale_den = 1;
    int view_width = 0;
    int view_height = 0;
    int from_line = 1;
    int to_line = 1;
    int granularity = 0;
    int doc_cols = 0;
    int doc_lines = 0;
    std::vector<OverviewRect> rects;
    std::vector<ErrorLine> error_lines;
    Rgb error_color;
};

struct OverviewRequest {
    int view_width = 0;
    int view_height = 0;
    int granularity = 0;
    int from_line = 1;
    int to_line = 1;
};

/// Throws Error(range) on invalid zoom bounds or view size.
OverviewModel overview_model(const BlockTree& tree, const SourceText& source, const OverviewRequest& request,
                             const Palette& palette, const ActivityMap* activity = nullptr);

OverviewModel mark_errors(OverviewModel model, const std::vector<int>& error_lines);

/// Evaluates the conditional-compilation chains for a set of defined symbols.
ActivityMap conditional_activity(const BlockTree& tree, const SourceText& source,
                                 const StructureGrammar& grammar, const std::set<std::string>& defines);

/// Parses and evaluates one directive expression. Supports defined(X),
/// defined X, bare symbols (true iff defined), integer literals, !, &&, || and
/// parentheses. Throws Error(expr) when unparseable.
bool evaluate_condition(std::string_view expression, const std::set<std::string>& defines);

} // namespace brics
