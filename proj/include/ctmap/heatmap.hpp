#pragma once

#include <string>

#include "ctmap/sweep.hpp"

namespace ctmap {

// Which per-cell score a heatmap shows.
enum class Measure { geometry, dimensionality, topology };

const char* to_string(Measure m);
Measure measure_from_string(const std::string& s);

// Analytic regime boundaries drawn over the grid: the spreading threshold
// in blue and the appearance threshold in red, one point per column.
struct OverlayOptions {
  bool enabled = false;
  int w = 0;          // front-width margin used by the appearance threshold
  long long q_t = -1; // activated-count parameter; -1 picks the largest
                      // count the lattice supports
};

// Renders one measure of a sweep as <out_prefix>.csv plus <out_prefix>.bmp.
// The grid must be a two-dimensional slice: thresholds on the rows (largest
// at the top) and either the non-geometric degree or gamma on the columns
// (ascending); when both gamma and dng vary, this throws config_error.  A
// missing or duplicated grid cell throws shape_error.  Undefined scores
// render as NA in the CSV and as white cells in the bitmap.  With overlay
// curves enabled (column axis must be the non-geometric degree), the two
// analytic thresholds are drawn over the cells and also written to
// <out_prefix>_overlay.csv.
void render_heatmap(const SweepResult& result, Measure measure,
                    const std::string& out_prefix,
                    const OverlayOptions& overlay = {});

}  // namespace ctmap
