#include "ctmap/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <vector>

#include "ctmap/bifurcation.hpp"
#include "ctmap/io_util.hpp"
#include "ctmap/torus_net.hpp"

namespace ctmap {

namespace {

constexpr int kCellPx = 12;

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
};

constexpr Rgb kNaColor = {255, 255, 255};
constexpr Rgb kSpreadColor = {0, 0, 255};      // spreading threshold marks
constexpr Rgb kAppearColor = {255, 0, 0};      // appearance threshold marks

// Dark-to-bright ramp; larger values render brighter.
constexpr Rgb kStops[7] = {{13, 8, 135},   {84, 2, 163},  {156, 23, 158},
                           {205, 62, 78},  {237, 121, 83}, {253, 180, 47},
                           {240, 249, 33}};

Rgb colormap(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * 6.0;
  int i = static_cast<int>(pos);
  if (i > 5) i = 5;
  const double f = pos - i;
  const auto lerp = [f](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * f));
  };
  return {lerp(kStops[i].r, kStops[i + 1].r), lerp(kStops[i].g, kStops[i + 1].g),
          lerp(kStops[i].b, kStops[i + 1].b)};
}

void put_u16(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  put_u16(out, v & 0xffff);
  put_u16(out, v >> 16);
}

// Uncompressed 24-bit bitmap; scanlines are stored bottom-up and padded to
// four bytes, `pixels` is row-major with row 0 at the top.
void write_bmp(const std::string& path, int width, int height,
               const std::vector<Rgb>& pixels) {
  const int row_bytes = ((width * 3 + 3) / 4) * 4;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(row_bytes) * static_cast<std::uint32_t>(height);
  std::string out;
  out.reserve(54 + data_size);
  out += "BM";
  put_u32(out, 54 + data_size);
  put_u32(out, 0);
  put_u32(out, 54);
  put_u32(out, 40);
  put_u32(out, static_cast<std::uint32_t>(width));
  put_u32(out, static_cast<std::uint32_t>(height));
  put_u16(out, 1);
  put_u16(out, 24);
  put_u32(out, 0);
  put_u32(out, data_size);
  put_u32(out, 2835);
  put_u32(out, 2835);
  put_u32(out, 0);
  put_u32(out, 0);
  for (int y = height - 1; y >= 0; --y) {
    for (int x = 0; x < width; ++x) {
      const Rgb& px = pixels[static_cast<std::size_t>(y) * width + x];
      out.push_back(static_cast<char>(px.b));
      out.push_back(static_cast<char>(px.g));
      out.push_back(static_cast<char>(px.r));
    }
    for (int pad = width * 3; pad < row_bytes; ++pad) out.push_back('\0');
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw io_error("cannot open " + path + " for writing");
  file << out;
  file.flush();
  if (!file) throw io_error("failed writing " + path);
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << body;
  out.flush();
  if (!out) throw io_error("failed writing " + path);
}

struct Grid {
  bool cols_are_dng = true;
  std::vector<int> col_dng;        // set when cols_are_dng
  std::vector<double> col_gamma;   // set otherwise
  std::vector<double> rows;        // thresholds, largest first
  std::vector<const SweepCell*> cells;  // rows x cols, row-major

  std::size_t num_cols() const {
    return cols_are_dng ? col_dng.size() : col_gamma.size();
  }
};

Grid build_grid(const SweepResult& result) {
  std::set<double> gammas;
  std::set<int> dngs;
  std::set<double> thresholds;
  for (const SweepCell& cell : result.cells) {
    gammas.insert(cell.gamma);
    dngs.insert(cell.dng);
    thresholds.insert(cell.threshold);
  }
  if (result.cells.empty()) throw shape_error("sweep result has no cells");
  if (gammas.size() > 1 && dngs.size() > 1)
    throw config_error(
        "heatmap needs a two-dimensional slice: fix either gamma or the "
        "non-geometric degree");

  Grid grid;
  grid.cols_are_dng = gammas.size() <= 1;
  if (grid.cols_are_dng)
    grid.col_dng.assign(dngs.begin(), dngs.end());
  else
    grid.col_gamma.assign(gammas.begin(), gammas.end());
  grid.rows.assign(thresholds.rbegin(), thresholds.rend());

  const std::size_t cols = grid.num_cols();
  grid.cells.assign(grid.rows.size() * cols, nullptr);
  for (const SweepCell& cell : result.cells) {
    std::size_t col;
    if (grid.cols_are_dng) {
      col = static_cast<std::size_t>(
          std::lower_bound(grid.col_dng.begin(), grid.col_dng.end(), cell.dng) -
          grid.col_dng.begin());
    } else {
      col = static_cast<std::size_t>(std::lower_bound(grid.col_gamma.begin(),
                                                      grid.col_gamma.end(),
                                                      cell.gamma) -
                                     grid.col_gamma.begin());
    }
    const std::size_t row = static_cast<std::size_t>(
        std::lower_bound(grid.rows.begin(), grid.rows.end(), cell.threshold,
                         std::greater<double>()) -
        grid.rows.begin());
    const std::size_t at = row * cols + col;
    if (grid.cells[at])
      throw shape_error("duplicate sweep cell at T=" +
                        format_fixed(cell.threshold, 3));
    grid.cells[at] = &cell;
  }
  for (const SweepCell* cell : grid.cells)
    if (!cell) throw shape_error("sweep grid is ragged: missing cells");
  return grid;
}

bool cell_value(const SweepCell& cell, Measure measure, double& value) {
  switch (measure) {
    case Measure::geometry:
      value = cell.rho;
      return cell.rho_defined;
    case Measure::dimensionality:
      value = cell.embedding_dim;
      return cell.dim_defined;
    case Measure::topology:
      value = cell.wasserstein;
      return cell.wasserstein_defined;
  }
  return false;
}

// Vertical pixel position of a threshold value, measured cell-center to
// cell-center over the plotted range.
bool mark_row(const Grid& grid, double t, int& y) {
  if (grid.rows.size() < 2) return false;
  const double top = grid.rows.front();
  const double bottom = grid.rows.back();
  if (!(t >= bottom && t <= top)) return false;
  const double span = static_cast<double>((grid.rows.size() - 1) * kCellPx);
  y = static_cast<int>(
      std::lround((top - t) / (top - bottom) * span + kCellPx / 2.0));
  return true;
}

}  // namespace

const char* to_string(Measure m) {
  switch (m) {
    case Measure::geometry:
      return "geometry";
    case Measure::dimensionality:
      return "dimensionality";
    case Measure::topology:
      return "topology";
  }
  return "geometry";
}

Measure measure_from_string(const std::string& s) {
  if (s == "geometry") return Measure::geometry;
  if (s == "dimensionality") return Measure::dimensionality;
  if (s == "topology") return Measure::topology;
  throw config_error("unknown measure: " + s);
}

void render_heatmap(const SweepResult& result, Measure measure,
                    const std::string& out_prefix,
                    const OverlayOptions& overlay) {
  const Grid grid = build_grid(result);
  const std::size_t cols = grid.num_cols();
  const std::size_t rows = grid.rows.size();

  // CSV: comment lines describing both axes, then the bare value matrix.
  std::string csv;
  csv += std::string("# ctmap-heatmap ") + to_string(measure) + "\n";
  csv += "# config_hash " + result.config_hash + "\n";
  csv += grid.cols_are_dng ? "# cols dng " : "# cols gamma ";
  for (std::size_t c = 0; c < cols; ++c) {
    if (c > 0) csv += ',';
    csv += grid.cols_are_dng ? std::to_string(grid.col_dng[c])
                             : format_fixed(grid.col_gamma[c], 1);
  }
  csv += "\n# rows T ";
  for (std::size_t r = 0; r < rows; ++r) {
    if (r > 0) csv += ',';
    csv += format_fixed(grid.rows[r], 3);
  }
  csv += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c > 0) csv += ',';
      double value = 0.0;
      csv += cell_value(*grid.cells[r * cols + c], measure, value)
                 ? format_double(value)
                 : "NA";
    }
    csv += '\n';
  }
  write_text_file(out_prefix + ".csv", csv);

  // Color scale over the defined values only.
  double lo = 0.0, hi = 0.0;
  bool any_defined = false;
  for (const SweepCell* cell : grid.cells) {
    double value = 0.0;
    if (!cell_value(*cell, measure, value)) continue;
    if (!any_defined) {
      lo = hi = value;
      any_defined = true;
    } else {
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
  }

  const int width = static_cast<int>(cols) * kCellPx;
  const int height = static_cast<int>(rows) * kCellPx;
  std::vector<Rgb> pixels(static_cast<std::size_t>(width) * height);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double value = 0.0;
      Rgb color = kNaColor;
      if (cell_value(*grid.cells[r * cols + c], measure, value))
        color = colormap(hi > lo ? (value - lo) / (hi - lo) : 0.5);
      for (int dy = 0; dy < kCellPx; ++dy)
        for (int dx = 0; dx < kCellPx; ++dx)
          pixels[(r * kCellPx + dy) * static_cast<std::size_t>(width) +
                 c * kCellPx + dx] = color;
    }
  }

  if (overlay.enabled) {
    if (!grid.cols_are_dng)
      throw config_error(
          "overlay curves need the non-geometric degree on the column axis");
    const int dG = static_cast<int>(
        geometric_neighbor_offsets(result.config.p2).size());
    const long long nodes =
        static_cast<long long>(result.config.n) * result.config.n;
    const long long qt = overlay.q_t >= 0 ? overlay.q_t : q_max(nodes, dG);

    std::string curve_csv = "dng,t_wfp,t_anc\n";
    const auto draw_mark = [&](std::size_t c, double t, const Rgb& color) {
      int y = 0;
      if (!mark_row(grid, t, y)) return;
      for (int dx = 0; dx < kCellPx; ++dx)
        pixels[static_cast<std::size_t>(y) * width + c * kCellPx + dx] = color;
    };
    for (std::size_t c = 0; c < cols; ++c) {
      const int dng = grid.col_dng[c];
      const double spread = t_wfp(dG, dng);
      curve_csv += std::to_string(dng) + ',' + format_double(spread);
      bool have_appear = false;
      double appear = 0.0;
      if (dng >= 1) {
        RegimeQuery query;
        query.dG = dG;
        query.dNG = dng;
        query.N = nodes;
        query.q_t = qt;
        query.w = overlay.w;
        try {
          const TAncResult anc = t_anc(query);
          if (!anc.no_anc) {
            appear = anc.value;
            have_appear = true;
          }
        } catch (const domain_error&) {
          // lattice too small for the estimate at this column; no mark
        }
      }
      curve_csv += ',';
      curve_csv += have_appear ? format_double(appear) : "NA";
      curve_csv += '\n';
      draw_mark(c, spread, kSpreadColor);
      if (have_appear) draw_mark(c, appear, kAppearColor);
    }
    write_text_file(out_prefix + "_overlay.csv", curve_csv);
  }

  write_bmp(out_prefix + ".bmp", width, height, pixels);
}

}  // namespace ctmap
