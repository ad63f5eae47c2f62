#pragma once

#include <string>
#include <vector>

#include "brics/refactor.hpp"
#include "brics/viewmodel.hpp"

namespace brics::gateway {

struct SvgOptions {
    int cell_width = 8;
    int cell_height = 16;
    int outset_x = 2; // px per nesting level below the deepest box
    int outset_y = 1;
};

/// Boxes first (parents before children), then one text element per visible
/// line. Lines hidden by `folds` are left out and the placeholder is drawn on
/// the opener line.
std::string render_svg(const std::vector<BlockRect>& rects, const std::vector<FoldSpan>& folds,
                       const SourceText& source, const SvgOptions& options = {});

/// Minimap picture of an overview model, error lines drawn last.
std::string render_overview_svg(const OverviewModel& model);

/// 256-colour background per cell from the deepest covering box. Removing the
/// escape sequences gives back the source bytes unchanged.
std::string render_ansi(const std::vector<BlockRect>& rects, const SourceText& source);

/// 256-colour grey used for a box: 255 and 253 alternate with depth, 250 marks
/// an inactive conditional region.
int ansi_background(const BlockRect& rect) noexcept;

} // namespace brics::gateway
