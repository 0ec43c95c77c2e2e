// Command-line front end: every pipeline stage is reachable on its own
// (network, contagion cache, map, scores, bifurcation table) next to the
// full sweep / gamma-study / heatmap workflow.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ctmap/bifurcation.hpp"
#include "ctmap/contagion.hpp"
#include "ctmap/contagion_map.hpp"
#include "ctmap/dimension.hpp"
#include "ctmap/geometry.hpp"
#include "ctmap/heatmap.hpp"
#include "ctmap/io_util.hpp"
#include "ctmap/persistence.hpp"
#include "ctmap/sweep.hpp"
#include "ctmap/torus_net.hpp"
#include "ctmap/version.hpp"
#include "ctmap/wasserstein.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ctmap::io_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Options for the single-network subcommands (net, contagion, map).
struct NetArgs {
  int n = 20;
  int p2 = 2;
  int q = 0;
  double gamma = 0.0;
  std::uint64_t seed = 1;
};

void add_net_options(CLI::App* cmd, NetArgs& args) {
  cmd->add_option("--n", args.n, "lattice side")->capture_default_str();
  cmd->add_option("--p2", args.p2, "squared geometric radius")
      ->capture_default_str();
  cmd->add_option("--q", args.q, "long-range edges per node")
      ->capture_default_str();
  cmd->add_option("--gamma", args.gamma, "long-range decay exponent")
      ->capture_default_str();
  cmd->add_option("--seed", args.seed, "network seed")->capture_default_str();
}

// Sweep options shared by `sweep` and `gamma`: an optional JSON config plus
// flag overrides (a flag wins over the file).
struct SweepArgs {
  std::string config_path;
  ctmap::SweepConfig overrides;
  std::vector<std::string> measure_names;
  std::string variant_name;
  std::string ground_name;
};

void add_sweep_options(CLI::App* cmd, SweepArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--n", args.overrides.n, "lattice side");
  cmd->add_option("--p2", args.overrides.p2, "squared geometric radius");
  cmd->add_option("--dng", args.overrides.dng, "non-geometric degrees")
      ->delimiter(',');
  cmd->add_option("--thresholds", args.overrides.thresholds,
                  "activation thresholds")
      ->delimiter(',');
  cmd->add_option("--gammas", args.overrides.gammas, "decay exponents")
      ->delimiter(',');
  cmd->add_option("--variant", args.variant_name,
                  "map variant: regular, reflected, symmetric");
  cmd->add_option("--seed", args.overrides.rng_seed, "base seed");
  cmd->add_option("--measures", args.measure_names,
                  "subset of geometry, dimensionality, topology")
      ->delimiter(',');
  cmd->add_option("--ground", args.ground_name,
                  "barcode ground metric: linf or l2");
  cmd->add_option("--wasserstein-q", args.overrides.wasserstein_q,
                  "Wasserstein exponent");
  cmd->add_option("--delta", args.overrides.delta, "horizon fraction");
  cmd->add_option("--out-dir", args.overrides.out_dir, "output directory");
  cmd->add_option("--workers", args.overrides.workers,
                  "worker threads (0 = all cores)");
}

ctmap::SweepConfig resolve_sweep_config(const CLI::App* cmd,
                                        const SweepArgs& args) {
  ctmap::SweepConfig cfg;
  if (!args.config_path.empty())
    cfg = ctmap::config_from_json_text(read_file(args.config_path));
  const auto given = [cmd](const std::string& name) {
    return cmd->count(name) > 0;
  };
  if (given("--n")) cfg.n = args.overrides.n;
  if (given("--p2")) cfg.p2 = args.overrides.p2;
  if (given("--dng")) cfg.dng = args.overrides.dng;
  if (given("--thresholds")) cfg.thresholds = args.overrides.thresholds;
  if (given("--gammas")) cfg.gammas = args.overrides.gammas;
  if (given("--variant"))
    cfg.variant = ctmap::map_variant_from_string(args.variant_name);
  if (given("--seed")) cfg.rng_seed = args.overrides.rng_seed;
  if (given("--measures")) {
    cfg.measures = {false, false, false};
    for (const std::string& name : args.measure_names) {
      if (name == "geometry") {
        cfg.measures.geometry = true;
      } else if (name == "dimensionality") {
        cfg.measures.dimensionality = true;
      } else if (name == "topology") {
        cfg.measures.topology = true;
      } else {
        throw ctmap::config_error("unknown measure: " + name);
      }
    }
  }
  if (given("--ground"))
    cfg.ground = ctmap::ground_metric_from_string(args.ground_name);
  if (given("--wasserstein-q"))
    cfg.wasserstein_q = args.overrides.wasserstein_q;
  if (given("--delta")) cfg.delta = args.overrides.delta;
  if (given("--out-dir")) cfg.out_dir = args.overrides.out_dir;
  if (given("--workers")) cfg.workers = args.overrides.workers;
  return cfg;
}

enum class SweepResultKind { full, gamma_study };

void run_sweep_command(SweepResultKind kind, const CLI::App* cmd,
                       const SweepArgs& args) {
  ctmap::SweepConfig cfg = resolve_sweep_config(cmd, args);
  const ctmap::SweepResult result = kind == SweepResultKind::full
                                        ? ctmap::run_sweep(cfg)
                                        : ctmap::run_gamma_study(cfg);
  if (!cfg.out_dir.empty()) {
    ctmap::write_sweep_outputs(result);
    std::cout << "wrote " << cfg.out_dir << "/results.csv ("
              << result.cells.size() << " cells, config "
              << result.config_hash << ")\n";
  } else {
    std::cout << ctmap::config_to_json_text(result.config);
    std::cout << result.cells.size() << " cells computed (no --out-dir)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contagion maps on noisy geometric torus networks"};
  app.set_version_flag("--version", ctmap::kVersion);
  app.require_subcommand(1);

  // net: build and save a network
  auto* net_cmd = app.add_subcommand("net", "build a network and save it");
  NetArgs net_args;
  std::string net_out;
  add_net_options(net_cmd, net_args);
  net_cmd->add_option("--out", net_out, "network file to write");
  net_cmd->callback([&] {
    const ctmap::Network net =
        ctmap::build_network(net_args.n, net_args.p2, net_args.q,
                             net_args.gamma, net_args.seed);
    if (!net_out.empty()) ctmap::save_network(net, net_out);
    std::cout << "nodes " << net.num_nodes() << ", geometric edges "
              << net.geometric_edges.size() << ", long-range edges "
              << net.nongeometric_edges.size() << '\n';
  });

  // contagion: all cluster-seeded realizations, saved as a binary cache
  auto* cont_cmd =
      app.add_subcommand("contagion", "compute an activation matrix");
  NetArgs cont_args;
  std::string cont_net_file;
  double cont_threshold = 0.25;
  int cont_workers = 0;
  std::string cont_out;
  add_net_options(cont_cmd, cont_args);
  cont_cmd->add_option("--net", cont_net_file,
                       "load this network file instead of building one");
  cont_cmd->add_option("--threshold", cont_threshold, "activation threshold")
      ->capture_default_str();
  cont_cmd->add_option("--workers", cont_workers, "worker threads");
  cont_cmd->add_option("--out", cont_out, "cache file to write")->required();
  cont_cmd->callback([&] {
    const ctmap::Network net =
        cont_net_file.empty()
            ? ctmap::build_network(cont_args.n, cont_args.p2, cont_args.q,
                                   cont_args.gamma, cont_args.seed)
            : ctmap::load_network(cont_net_file);
    const ctmap::ContagionConfig cfg{cont_threshold};
    const ctmap::ActivationMatrix m =
        ctmap::activation_matrix(net, cfg, cont_workers);
    ctmap::save_activation_cache(cont_out, net, cfg, m);
    const long long sentinels =
        (m.array() == ctmap::activation_sentinel(net.num_nodes())).count();
    std::cout << "saved " << m.rows() << "x" << m.cols() << " times, "
              << sentinels << " sentinel entries\n";
  });

  // map: activation matrix -> point cloud CSV
  auto* map_cmd = app.add_subcommand("map", "build a contagion map");
  NetArgs map_args;
  std::string map_net_file;
  std::string map_cache;
  double map_threshold = 0.25;
  std::string map_variant = "symmetric";
  std::string map_out;
  add_net_options(map_cmd, map_args);
  map_cmd->add_option("--net", map_net_file,
                      "load this network file instead of building one");
  map_cmd->add_option("--cache", map_cache,
                      "activation cache to reuse (recomputed on mismatch)");
  map_cmd->add_option("--threshold", map_threshold, "activation threshold")
      ->capture_default_str();
  map_cmd->add_option("--variant", map_variant,
                      "regular, reflected, or symmetric")
      ->capture_default_str();
  map_cmd->add_option("--out", map_out, "point-cloud CSV to write")
      ->required();
  map_cmd->callback([&] {
    const ctmap::Network net =
        map_net_file.empty()
            ? ctmap::build_network(map_args.n, map_args.p2, map_args.q,
                                   map_args.gamma, map_args.seed)
            : ctmap::load_network(map_net_file);
    const ctmap::ContagionConfig cfg{map_threshold};
    ctmap::ActivationMatrix m;
    bool from_cache = false;
    if (!map_cache.empty() &&
        ctmap::load_activation_cache(map_cache, net, cfg, m) ==
            ctmap::CacheLoad::ok)
      from_cache = true;
    if (!from_cache) {
      m = ctmap::activation_matrix(net, cfg, 0);
      if (!map_cache.empty()) ctmap::save_activation_cache(map_cache, net, cfg, m);
    }
    const ctmap::PointCloud cloud =
        ctmap::build_map<double>(m, ctmap::map_variant_from_string(map_variant));
    ctmap::save_point_cloud(map_out, cloud);
    std::cout << "wrote " << cloud.num_points() << " points ("
              << (cloud.has_infinite ? "with" : "no") << " sentinel entries)\n";
  });

  // score: measures of a saved point cloud
  auto* score_cmd =
      app.add_subcommand("score", "score a point cloud against the torus");
  std::string score_cloud_file;
  std::vector<std::string> score_measures = {"geometry", "dimensionality"};
  std::string score_ground = "linf";
  double score_q = 2.0;
  score_cmd->add_option("--cloud", score_cloud_file, "point-cloud CSV")
      ->required();
  score_cmd->add_option("--measures", score_measures,
                        "subset of geometry, dimensionality, topology")
      ->delimiter(',')
      ->capture_default_str();
  score_cmd->add_option("--ground", score_ground, "linf or l2")
      ->capture_default_str();
  score_cmd->add_option("--wasserstein-q", score_q, "Wasserstein exponent")
      ->capture_default_str();
  score_cmd->callback([&] {
    const ctmap::PointCloud cloud = ctmap::load_point_cloud(score_cloud_file);
    const int n =
        static_cast<int>(std::llround(std::sqrt(double(cloud.num_points()))));
    std::cout << "has_infinite " << (cloud.has_infinite ? 1 : 0) << '\n';
    for (const std::string& m : score_measures) {
      if (m == "geometry") {
        try {
          std::cout << "rho " << ctmap::format_double(ctmap::geometry_score(cloud, n))
                    << '\n';
        } catch (const ctmap::undefined_correlation_error&) {
          std::cout << "rho NA\n";
        }
      } else if (m == "dimensionality") {
        const ctmap::EmbeddingReport rep = ctmap::embedding_dimension(cloud);
        std::cout << "P " << rep.P << "\nresiduals [";
        for (std::size_t i = 0; i < rep.residuals.size(); ++i)
          std::cout << (i ? "," : "")
                    << ctmap::format_double(rep.residuals[i]);
        std::cout << "]\n";
      } else if (m == "topology") {
        if (cloud.has_infinite) {
          std::cout << "wasserstein NA\n";
          continue;
        }
        const ctmap::Barcode ref = ctmap::reference_torus_barcode(n);
        std::cout << "wasserstein "
                  << ctmap::format_double(ctmap::topology_score(
                         cloud, ref, score_q,
                         ctmap::ground_metric_from_string(score_ground)))
                  << '\n';
      } else {
        throw ctmap::config_error("unknown measure: " + m);
      }
    }
  });

  // sweep / gamma: the full grid experiments
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  SweepArgs sweep_args;
  add_sweep_options(sweep_cmd, sweep_args);
  sweep_cmd->callback(
      [&] { run_sweep_command(SweepResultKind::full, sweep_cmd, sweep_args); });

  auto* gamma_cmd =
      app.add_subcommand("gamma", "run a gamma study at fixed dng");
  SweepArgs gamma_args;
  add_sweep_options(gamma_cmd, gamma_args);
  gamma_cmd->callback([&] {
    run_sweep_command(SweepResultKind::gamma_study, gamma_cmd, gamma_args);
  });

  // bifurcation: analytic threshold table
  auto* bif_cmd =
      app.add_subcommand("bifurcation", "tabulate the analytic thresholds");
  int bif_dg = 8;
  int bif_dng_max = 25;
  long long bif_nodes = 2500;
  long long bif_qt = -1;
  int bif_w = 0;
  std::string bif_mode = "binomial";
  std::string bif_out;
  bif_cmd->add_option("--dg", bif_dg, "geometric degree")
      ->capture_default_str();
  bif_cmd->add_option("--dng-max", bif_dng_max, "largest non-geometric degree")
      ->capture_default_str();
  bif_cmd->add_option("--nodes", bif_nodes, "network size N")
      ->capture_default_str();
  bif_cmd->add_option("--qt", bif_qt,
                      "activated count (default: largest supported)");
  bif_cmd->add_option("--w", bif_w, "front-width margin")
      ->capture_default_str();
  bif_cmd->add_option("--mode", bif_mode,
                      "in-degree model: binomial or exact")
      ->capture_default_str();
  bif_cmd->add_option("--out", bif_out, "CSV file (default: stdout)");
  bif_cmd->callback([&] {
    const ctmap::DinMode mode = [&] {
      if (bif_mode == "binomial") return ctmap::DinMode::binomial;
      if (bif_mode == "exact") return ctmap::DinMode::exact;
      throw ctmap::config_error("unknown in-degree mode: " + bif_mode);
    }();
    const long long qt =
        bif_qt >= 0 ? bif_qt : ctmap::q_max(bif_nodes, bif_dg);
    std::string csv = "dNG,t_wfp,anc_horizon,anc_lower_bound,t_anc\n";
    for (int dng = 0; dng <= bif_dng_max; ++dng) {
      ctmap::RegimeQuery query;
      query.dG = bif_dg;
      query.dNG = dng;
      query.N = bif_nodes;
      query.q_t = qt;
      query.w = bif_w;
      csv += std::to_string(dng);
      csv += ',' + ctmap::format_double(ctmap::t_wfp(bif_dg, dng));
      csv += ',' + ctmap::format_double(ctmap::anc_horizon(bif_dg, dng));
      csv += ',' + ctmap::format_double(ctmap::anc_lower_bound(query));
      csv += ',';
      if (dng < 1) {
        csv += "NA";
      } else {
        const ctmap::TAncResult anc = ctmap::t_anc(query, mode);
        csv += anc.no_anc ? "NA" : ctmap::format_double(anc.value);
      }
      csv += '\n';
    }
    if (bif_out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(bif_out, std::ios::binary | std::ios::trunc);
      if (!out) throw ctmap::io_error("cannot open " + bif_out);
      out << csv;
    }
  });

  // render: heatmap files from a sweep directory
  auto* render_cmd =
      app.add_subcommand("render", "render a sweep as a heatmap");
  std::string render_dir;
  std::string render_measure = "geometry";
  std::string render_out;
  bool render_overlay = false;
  int render_w = 0;
  long long render_qt = -1;
  render_cmd->add_option("--dir", render_dir, "sweep output directory")
      ->required();
  render_cmd->add_option("--measure", render_measure,
                         "geometry, dimensionality, or topology")
      ->capture_default_str();
  render_cmd->add_option("--out", render_out, "output path prefix")
      ->required();
  render_cmd->add_flag("--overlay", render_overlay,
                       "draw the analytic threshold curves");
  render_cmd->add_option("--overlay-w", render_w, "front-width margin");
  render_cmd->add_option("--overlay-qt", render_qt,
                         "activated count (default: largest supported)");
  render_cmd->callback([&] {
    const ctmap::SweepResult result = ctmap::read_sweep_result(render_dir);
    ctmap::OverlayOptions overlay;
    overlay.enabled = render_overlay;
    overlay.w = render_w;
    overlay.q_t = render_qt;
    ctmap::render_heatmap(result,
                          ctmap::measure_from_string(render_measure),
                          render_out, overlay);
    std::cout << "wrote " << render_out << ".csv and " << render_out
              << ".bmp\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ctmap::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
