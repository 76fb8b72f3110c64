#pragma once

#include <string>

#include "ccts/attribution/matrix.hpp"

namespace ccts::report {

// Fill colour of a value on the blue-white-red scale over [-range, range]
// ("#rrggbb"); white when range is 0.
std::string diverging_color(double value, double range);

// SVG heatmap: one rect per cell (rows = concepts, columns = channels then
// "global"), a star polygon on significant cells, and a <title> tooltip with
// the value. The colour range is symmetric, max |ate| over the grid unless
// `range` > 0 is given. Missing cells are grey.
std::string heatmap_svg(const attribution::AttributionResult& r, const std::string& title,
                        double range = 0.0);

// Writes heatmap_svg to `path`. Throws IoError / DataError (empty result).
void emit_heatmap(const attribution::AttributionResult& r, const std::string& path,
                  const std::string& title = "", double range = 0.0);

}  // namespace ccts::report
