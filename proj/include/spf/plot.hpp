#pragma once

#include <optional>
#include <string>

#include "spf/frontier.hpp"

namespace spf {

struct PlotOptions {
  std::string title = "Selection possibility frontier";
  // Drawn as a red point with dashed guides to the frontier along both axes.
  std::optional<ParetoGapReport> actual;
};

// Self-contained SVG: frontier as a green polyline with markers, diversity
// on the y axis and mean cohort performance on the x axis. Output depends
// only on the inputs.
std::string render_frontier_svg(const Frontier& frontier, const PlotOptions& options = {});

}  // namespace spf
