#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctmap/contagion_map.hpp"
#include "ctmap/wasserstein.hpp"

namespace ctmap {

// Which per-cell scores a sweep computes.  Geometry is the correlation
// between map distances and torus distances, dimensionality is the embedding
// dimension search, topology is the barcode distance to the reference torus.
struct MeasureSet {
  bool geometry = true;
  bool dimensionality = true;
  bool topology = true;

  bool any() const { return geometry || dimensionality || topology; }
};

// Full description of a parameter sweep.  Everything that affects the
// numbers lives here; `out_dir` and `workers` only affect where results are
// written and how fast they arrive, so they are excluded from the config
// hash.
struct SweepConfig {
  int n = 20;
  int p2 = 2;
  std::vector<int> dng;           // non-geometric degree grid
  std::vector<double> thresholds; // activation threshold grid
  std::vector<double> gammas = {0.0};
  MapVariant variant = MapVariant::symmetric;
  std::uint64_t rng_seed = 1;
  MeasureSet measures;
  GroundMetric ground = GroundMetric::linf;
  double wasserstein_q = 2.0;
  double delta = 0.6;
  std::string out_dir;
  int workers = 1;
};

// One grid cell.  Undefined scores (measure disabled, degenerate input, or
// sentinel entries blocking the barcode) keep their `*_defined` flag false
// and serialize as NA.
struct SweepCell {
  double gamma = 0.0;
  int dng = 0;
  double threshold = 0.0;
  bool has_infinite = false;
  double rho = 0.0;
  bool rho_defined = false;
  int embedding_dim = 0;
  std::vector<double> residuals;
  bool dim_defined = false;
  double wasserstein = 0.0;
  bool wasserstein_defined = false;
  double wallclock_seconds = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::string config_hash;
  std::vector<SweepCell> cells;  // ordered gamma, then dng, then threshold
};

// Throws config_error when the grid is unusable: empty dng / threshold /
// gamma lists, thresholds outside [0, 1], no measures enabled, a Wasserstein
// exponent below 1, or a horizon fraction outside (0, 1).
void validate(const SweepConfig& cfg);

// Hash of the science-relevant part of the config (everything except
// out_dir and workers), as fixed-width hex.  Stable across platforms; used
// to stamp results and to detect stale cache directories.
std::string config_hash(const SweepConfig& cfg);

// Runs the full grid.  One network is built per (gamma, dng) pair with a
// seed derived from rng_seed and those two values, then every threshold is
// evaluated on it.  When out_dir is nonempty, activation matrices are cached
// there and reused on later runs; a cache file whose header disagrees with
// the requested cell is recomputed and overwritten with a warning.  Cell
// order in the result is deterministic and independent of `workers`.
SweepResult run_sweep(const SweepConfig& cfg);

// Sweep specialization that varies gamma at a single fixed dng.  Throws
// config_error when the gamma list is empty or more than one dng is given.
SweepResult run_gamma_study(const SweepConfig& cfg);

// Writes results.csv, timings.csv, and manifest.json into cfg.out_dir.
// results.csv and manifest.json are byte-deterministic for a given config;
// timings.csv carries the wallclock column and is expected to differ from
// run to run.  Throws io_error when out_dir is empty or a file cannot be
// written.
void write_sweep_outputs(const SweepResult& result);

// Reads back a directory written by write_sweep_outputs.
SweepResult read_sweep_result(const std::string& dir);

// JSON round trip for configs, used by the CLI and the manifest.
SweepConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const SweepConfig& cfg);

}  // namespace ctmap
