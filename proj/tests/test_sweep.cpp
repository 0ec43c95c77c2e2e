#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ctmap/heatmap.hpp"
#include "ctmap/sweep.hpp"

using namespace ctmap;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

SweepConfig tiny_config() {
  SweepConfig cfg;
  cfg.n = 10;
  cfg.p2 = 2;
  cfg.dng = {0, 2};
  cfg.thresholds = {0.1, 0.2, 0.3};
  cfg.gammas = {0.0, 0.5};
  cfg.rng_seed = 7;
  cfg.measures.geometry = true;
  cfg.measures.dimensionality = true;
  cfg.measures.topology = false;
  return cfg;
}

// A hand-assembled 2 x 2 grid with one undefined cell, for render tests.
SweepResult toy_result() {
  SweepResult result;
  result.config.n = 20;
  result.config.p2 = 2;
  result.config.dng = {0, 2};
  result.config.thresholds = {0.2, 0.4};
  result.config_hash = "00000000deadbeef";
  const auto add = [&](int dng, double t, double rho, bool defined) {
    SweepCell cell;
    cell.dng = dng;
    cell.threshold = t;
    cell.rho = rho;
    cell.rho_defined = defined;
    result.cells.push_back(cell);
  };
  add(0, 0.2, 0.8, true);
  add(0, 0.4, 0.2, true);
  add(2, 0.2, 0.5, true);
  add(2, 0.4, 0.0, false);
  return result;
}

struct Pixel {
  int b = 0, g = 0, r = 0;
};

// Pixel at image coordinates (x, y), y = 0 at the top.
Pixel bmp_pixel(const std::string& bytes, int width, int height, int x, int y) {
  const int row_bytes = ((width * 3 + 3) / 4) * 4;
  const std::size_t at = 54 + static_cast<std::size_t>(height - 1 - y) * row_bytes +
                         static_cast<std::size_t>(x) * 3;
  REQUIRE(at + 2 < bytes.size());
  const auto u = [&](std::size_t k) {
    return static_cast<int>(static_cast<unsigned char>(bytes[k]));
  };
  return {u(at), u(at + 1), u(at + 2)};
}

}  // namespace

TEST_CASE("configs are validated before any work starts") {
  SweepConfig cfg = tiny_config();
  CHECK_NOTHROW(validate(cfg));

  SweepConfig bad = cfg;
  bad.dng.clear();
  CHECK_THROWS_AS(validate(bad), config_error);

  bad = cfg;
  bad.thresholds.clear();
  CHECK_THROWS_AS(validate(bad), config_error);

  bad = cfg;
  bad.thresholds = {0.2, 1.2};
  CHECK_THROWS_AS(validate(bad), config_error);

  bad = cfg;
  bad.thresholds = {-0.1};
  CHECK_THROWS_AS(validate(bad), config_error);

  bad = cfg;
  bad.gammas.clear();
  CHECK_THROWS_AS(validate(bad), config_error);

  bad = cfg;
  bad.gammas = {-0.5};
  CHECK_THROWS_AS(validate(bad), config_error);

  bad = cfg;
  bad.measures = {false, false, false};
  CHECK_THROWS_AS(validate(bad), config_error);

  bad = cfg;
  bad.wasserstein_q = 0.5;
  CHECK_THROWS_AS(validate(bad), config_error);

  bad = cfg;
  bad.delta = 1.0;
  CHECK_THROWS_AS(validate(bad), config_error);

  bad = cfg;
  bad.n = 1;
  CHECK_THROWS_AS(validate(bad), config_error);
}

TEST_CASE("the gamma study insists on a single degree column") {
  SweepConfig cfg = tiny_config();
  cfg.dng = {0, 2};
  CHECK_THROWS_AS(run_gamma_study(cfg), config_error);
}

TEST_CASE("a deterministic lattice sweep lands in the known regimes") {
  SweepConfig cfg;
  cfg.n = 20;
  cfg.p2 = 2;
  cfg.dng = {0};
  cfg.thresholds = {0.2, 0.4};
  cfg.gammas = {0.0};
  const SweepResult result = run_sweep(cfg);
  CHECK(result.config_hash == config_hash(cfg));
  REQUIRE(result.cells.size() == 2);

  const SweepCell& spreading = result.cells[0];
  CHECK(spreading.threshold == 0.2);
  CHECK_FALSE(spreading.has_infinite);
  REQUIRE(spreading.rho_defined);
  CHECK(spreading.rho >= 0.9);
  REQUIRE(spreading.dim_defined);
  CHECK(spreading.embedding_dim == 4);
  REQUIRE(spreading.wasserstein_defined);
  CHECK(spreading.wasserstein >= 0.0);

  const SweepCell& stalled = result.cells[1];
  CHECK(stalled.threshold == 0.4);
  CHECK(stalled.has_infinite);
  REQUIRE(stalled.rho_defined);
  CHECK(stalled.rho == doctest::Approx(0.5356698704830171).epsilon(1e-12));
  // Sentinel coordinates block the barcode comparison.
  CHECK_FALSE(stalled.wasserstein_defined);
}

TEST_CASE("cells come back in grid order whatever the worker count") {
  TempDir dir_a("sweep_out_a");
  TempDir dir_b("sweep_out_b");

  SweepConfig cfg = tiny_config();
  cfg.out_dir = dir_a.path.string();
  cfg.workers = 1;
  const SweepResult serial = run_sweep(cfg);
  REQUIRE(serial.cells.size() == 12);

  // gamma varies slowest, then dng, then the threshold.
  std::size_t at = 0;
  for (const double gamma : cfg.gammas)
    for (const int dng : cfg.dng)
      for (const double t : cfg.thresholds) {
        CHECK(serial.cells[at].gamma == gamma);
        CHECK(serial.cells[at].dng == dng);
        CHECK(serial.cells[at].threshold == t);
        ++at;
      }

  write_sweep_outputs(serial);

  SweepConfig parallel_cfg = tiny_config();
  parallel_cfg.out_dir = dir_b.path.string();
  parallel_cfg.workers = 4;
  const SweepResult parallel = run_sweep(parallel_cfg);
  write_sweep_outputs(parallel);

  CHECK(config_hash(cfg) == config_hash(parallel_cfg));
  CHECK(slurp(dir_a.path / "results.csv") == slurp(dir_b.path / "results.csv"));
  CHECK(slurp(dir_a.path / "manifest.json") ==
        slurp(dir_b.path / "manifest.json"));
}

TEST_CASE("cached activation matrices are reused and survive corruption") {
  TempDir dir("sweep_out_cache");
  SweepConfig cfg = tiny_config();
  cfg.dng = {2};
  cfg.gammas = {0.5};
  cfg.out_dir = dir.path.string();

  const SweepResult cold = run_sweep(cfg);
  write_sweep_outputs(cold);
  const std::string cold_results = slurp(dir.path / "results.csv");

  std::size_t cache_files = 0;
  for (const auto& entry : fs::directory_iterator(dir.path)) {
    if (entry.path().extension() == ".bin") ++cache_files;
  }
  CHECK(cache_files == cfg.thresholds.size());

  // Warm rerun: same bytes out.
  const SweepResult warm = run_sweep(cfg);
  write_sweep_outputs(warm);
  CHECK(slurp(dir.path / "results.csv") == cold_results);

  // A damaged cache entry is detected and recomputed.
  for (const auto& entry : fs::directory_iterator(dir.path)) {
    if (entry.path().extension() == ".bin") {
      fs::resize_file(entry.path(), 16);
      break;
    }
  }
  const SweepResult repaired = run_sweep(cfg);
  write_sweep_outputs(repaired);
  CHECK(slurp(dir.path / "results.csv") == cold_results);
}

TEST_CASE("a written sweep reads back value for value") {
  TempDir dir("sweep_out_roundtrip");
  SweepConfig cfg = tiny_config();
  cfg.out_dir = dir.path.string();
  const SweepResult result = run_sweep(cfg);
  write_sweep_outputs(result);

  const std::string results_text = slurp(dir.path / "results.csv");
  CHECK(results_text.rfind("# ctmap-sweep 1\n", 0) == 0);
  CHECK(results_text.find("# config_hash " + result.config_hash) !=
        std::string::npos);
  CHECK(results_text.find("gamma,dng,T,rho,P,residuals,wasserstein,"
                          "has_infinite") != std::string::npos);

  const SweepResult loaded = read_sweep_result(dir.path.string());
  CHECK(loaded.config_hash == result.config_hash);
  CHECK(loaded.config.n == cfg.n);
  CHECK(loaded.config.p2 == cfg.p2);
  CHECK(loaded.config.dng == cfg.dng);
  CHECK(loaded.config.thresholds == cfg.thresholds);
  CHECK(loaded.config.gammas == cfg.gammas);
  CHECK(loaded.config.rng_seed == cfg.rng_seed);
  REQUIRE(loaded.cells.size() == result.cells.size());
  for (std::size_t k = 0; k < result.cells.size(); ++k) {
    const SweepCell& a = result.cells[k];
    const SweepCell& b = loaded.cells[k];
    CHECK(a.gamma == b.gamma);
    CHECK(a.dng == b.dng);
    CHECK(a.threshold == b.threshold);
    CHECK(a.has_infinite == b.has_infinite);
    CHECK(a.rho_defined == b.rho_defined);
    if (a.rho_defined) CHECK(a.rho == b.rho);
    CHECK(a.dim_defined == b.dim_defined);
    if (a.dim_defined) {
      CHECK(a.embedding_dim == b.embedding_dim);
      CHECK(a.residuals == b.residuals);
    }
    CHECK(a.wasserstein_defined == b.wasserstein_defined);
    if (a.wasserstein_defined) CHECK(a.wasserstein == b.wasserstein);
  }
}

TEST_CASE("configs survive a json round trip") {
  SweepConfig cfg = tiny_config();
  cfg.variant = MapVariant::reflected;
  cfg.ground = GroundMetric::l2;
  cfg.wasserstein_q = 3.0;
  cfg.delta = 0.4;
  const SweepConfig back = config_from_json_text(config_to_json_text(cfg));
  CHECK(back.n == cfg.n);
  CHECK(back.p2 == cfg.p2);
  CHECK(back.dng == cfg.dng);
  CHECK(back.thresholds == cfg.thresholds);
  CHECK(back.gammas == cfg.gammas);
  CHECK(back.variant == cfg.variant);
  CHECK(back.rng_seed == cfg.rng_seed);
  CHECK(back.measures.geometry == cfg.measures.geometry);
  CHECK(back.measures.dimensionality == cfg.measures.dimensionality);
  CHECK(back.measures.topology == cfg.measures.topology);
  CHECK(back.ground == cfg.ground);
  CHECK(back.wasserstein_q == cfg.wasserstein_q);
  CHECK(back.delta == cfg.delta);
  CHECK(config_hash(back) == config_hash(cfg));

  // Partial configs keep their defaults.
  const SweepConfig partial = config_from_json_text(
      R"({"dng": [1], "thresholds": [0.2], "measures": ["geometry"]})");
  CHECK(partial.n == 20);
  CHECK(partial.dng == std::vector<int>{1});
  CHECK(partial.measures.geometry);
  CHECK_FALSE(partial.measures.dimensionality);
  CHECK_FALSE(partial.measures.topology);

  CHECK_THROWS_AS(config_from_json_text("{nonsense"), config_error);
  CHECK_THROWS_AS(
      config_from_json_text(R"({"measures": ["geometry", "sparkle"]})"),
      config_error);
  CHECK_THROWS_AS(config_from_json_text(R"({"variant": "sideways"})"),
                  config_error);
}

TEST_CASE("heatmaps render the value matrix exactly") {
  TempDir dir("heatmap_out");
  fs::create_directories(dir.path);
  const SweepResult toy = toy_result();
  const std::string prefix = (dir.path / "geometry").string();
  render_heatmap(toy, Measure::geometry, prefix);

  CHECK(slurp(prefix + ".csv") ==
        "# ctmap-heatmap geometry\n"
        "# config_hash 00000000deadbeef\n"
        "# cols dng 0,2\n"
        "# rows T 0.400,0.200\n"
        "0.2,NA\n"
        "0.8,0.5\n");

  const std::string bmp = slurp(prefix + ".bmp");
  REQUIRE(bmp.size() == 54 + 24u * 72u);
  CHECK(bmp.substr(0, 2) == "BM");

  // Lowest defined value: darkest stop. Top-left cell.
  const Pixel dark = bmp_pixel(bmp, 24, 24, 0, 0);
  CHECK(dark.r == 13);
  CHECK(dark.g == 8);
  CHECK(dark.b == 135);
  // Undefined cell renders white. Top-right cell.
  const Pixel na = bmp_pixel(bmp, 24, 24, 12, 0);
  CHECK(na.r == 255);
  CHECK(na.g == 255);
  CHECK(na.b == 255);
  // Highest value: brightest stop. Bottom-left cell.
  const Pixel bright = bmp_pixel(bmp, 24, 24, 0, 23);
  CHECK(bright.r == 240);
  CHECK(bright.g == 249);
  CHECK(bright.b == 33);
  // Midpoint value: the middle stop. Bottom-right cell.
  const Pixel mid = bmp_pixel(bmp, 24, 24, 12, 23);
  CHECK(mid.r == 205);
  CHECK(mid.g == 62);
  CHECK(mid.b == 78);
}

TEST_CASE("overlay curves land on the right rows and in the csv") {
  TempDir dir("heatmap_overlay_out");
  fs::create_directories(dir.path);
  const SweepResult toy = toy_result();

  OverlayOptions overlay;
  overlay.enabled = true;
  const std::string prefix = (dir.path / "with_default_qt").string();
  render_heatmap(toy, Measure::geometry, prefix, overlay);
  // n = 20, eight lattice neighbors: the default active count is 8,
  // too thin for an appearance threshold at either column.
  CHECK(slurp(prefix + "_overlay.csv") ==
        "dng,t_wfp,t_anc\n"
        "0,0.375,NA\n"
        "2,0.3,NA\n");

  // Spreading marks: 0.375 maps 1.5 px below the top row center, 0.3
  // to the exact row boundary.
  const std::string bmp = slurp(prefix + ".bmp");
  const Pixel spread_a = bmp_pixel(bmp, 24, 24, 0, 8);
  CHECK(spread_a.r == 0);
  CHECK(spread_a.g == 0);
  CHECK(spread_a.b == 255);
  const Pixel spread_b = bmp_pixel(bmp, 24, 24, 12, 12);
  CHECK(spread_b.r == 0);
  CHECK(spread_b.g == 0);
  CHECK(spread_b.b == 255);

  // A denser active set admits an appearance threshold on the dng = 2
  // column.
  OverlayOptions explicit_qt;
  explicit_qt.enabled = true;
  explicit_qt.q_t = 50;
  const std::string prefix2 = (dir.path / "with_explicit_qt").string();
  render_heatmap(toy, Measure::geometry, prefix2, explicit_qt);
  CHECK(slurp(prefix2 + "_overlay.csv") ==
        "dng,t_wfp,t_anc\n"
        "0,0.375,NA\n"
        "2,0.3,0.1\n");
}

TEST_CASE("heatmaps reject unusable grids") {
  TempDir dir("heatmap_bad_out");
  fs::create_directories(dir.path);
  const std::string prefix = (dir.path / "bad").string();

  SweepResult dup = toy_result();
  dup.cells.push_back(dup.cells.front());
  CHECK_THROWS_AS(render_heatmap(dup, Measure::geometry, prefix), shape_error);

  SweepResult ragged = toy_result();
  ragged.cells.pop_back();
  CHECK_THROWS_AS(render_heatmap(ragged, Measure::geometry, prefix),
                  shape_error);

  SweepResult cube = toy_result();
  cube.cells[1].gamma = 1.0;  // now both gamma and dng vary
  CHECK_THROWS_AS(render_heatmap(cube, Measure::geometry, prefix),
                  config_error);

  // Gamma columns are fine on their own, but exclude overlays.
  SweepResult gamma_cols = toy_result();
  for (auto& cell : gamma_cols.cells) cell.dng = 2;
  gamma_cols.cells[0].gamma = 0.0;
  gamma_cols.cells[1].gamma = 0.0;
  gamma_cols.cells[2].gamma = 1.0;
  gamma_cols.cells[3].gamma = 1.0;
  CHECK_NOTHROW(render_heatmap(gamma_cols, Measure::geometry, prefix));
  CHECK(slurp(prefix + ".csv").find("# cols gamma 0.0,1.0") !=
        std::string::npos);
  OverlayOptions overlay;
  overlay.enabled = true;
  CHECK_THROWS_AS(render_heatmap(gamma_cols, Measure::geometry, prefix, overlay),
                  config_error);
}
