#include "ctmap/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "ctmap/barcode.hpp"
#include "ctmap/contagion.hpp"
#include "ctmap/dimension.hpp"
#include "ctmap/geometry.hpp"
#include "ctmap/io_util.hpp"
#include "ctmap/parallel.hpp"
#include "ctmap/persistence.hpp"
#include "ctmap/rng.hpp"
#include "ctmap/torus_net.hpp"
#include "ctmap/version.hpp"

namespace ctmap {

namespace {

constexpr const char* kResultsHeader =
    "gamma,dng,T,rho,P,residuals,wasserstein,has_infinite";

std::string fmt_gamma(double gamma) { return format_fixed(gamma, 1); }
std::string fmt_threshold(double t) { return format_fixed(t, 3); }

std::uint64_t gamma_decile(double gamma) {
  return static_cast<std::uint64_t>(std::lround(gamma * 10.0));
}

// Science-relevant keys only, in a fixed order; this is both the manifest
// payload and the byte string behind the config hash.
nlohmann::ordered_json science_json(const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["n"] = cfg.n;
  j["p2"] = cfg.p2;
  j["dng"] = cfg.dng;
  j["thresholds"] = cfg.thresholds;
  j["gammas"] = cfg.gammas;
  j["variant"] = to_string(cfg.variant);
  j["rng_seed"] = cfg.rng_seed;
  std::vector<std::string> measures;
  if (cfg.measures.geometry) measures.emplace_back("geometry");
  if (cfg.measures.dimensionality) measures.emplace_back("dimensionality");
  if (cfg.measures.topology) measures.emplace_back("topology");
  j["measures"] = measures;
  j["ground"] = to_string(cfg.ground);
  j["wasserstein_q"] = cfg.wasserstein_q;
  j["delta"] = cfg.delta;
  return j;
}

SweepConfig config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  try {
    if (j.contains("n")) cfg.n = j.at("n").get<int>();
    if (j.contains("p2")) cfg.p2 = j.at("p2").get<int>();
    if (j.contains("dng")) cfg.dng = j.at("dng").get<std::vector<int>>();
    if (j.contains("thresholds"))
      cfg.thresholds = j.at("thresholds").get<std::vector<double>>();
    if (j.contains("gammas"))
      cfg.gammas = j.at("gammas").get<std::vector<double>>();
    if (j.contains("variant"))
      cfg.variant = map_variant_from_string(j.at("variant").get<std::string>());
    if (j.contains("rng_seed"))
      cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    if (j.contains("measures")) {
      cfg.measures.geometry = false;
      cfg.measures.dimensionality = false;
      cfg.measures.topology = false;
      for (const auto& entry : j.at("measures")) {
        const std::string name = entry.get<std::string>();
        if (name == "geometry") {
          cfg.measures.geometry = true;
        } else if (name == "dimensionality") {
          cfg.measures.dimensionality = true;
        } else if (name == "topology") {
          cfg.measures.topology = true;
        } else {
          throw config_error("unknown measure: " + name);
        }
      }
    }
    if (j.contains("ground"))
      cfg.ground = ground_metric_from_string(j.at("ground").get<std::string>());
    if (j.contains("wasserstein_q"))
      cfg.wasserstein_q = j.at("wasserstein_q").get<double>();
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad sweep config: ") + e.what());
  }
  return cfg;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string cache_path(const SweepConfig& cfg, const Network& net,
                       const ContagionConfig& ccfg) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "act_n%d_p%d_g%lld_q%d_t%d_s%016llx.bin",
                net.n, net.p2, static_cast<long long>(net.gamma10), net.q,
                ccfg.threshold_milli(),
                static_cast<unsigned long long>(net.seed));
  return (std::filesystem::path(cfg.out_dir) / buf).string();
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << body;
  out.flush();
  if (!out) throw io_error("failed writing " + path);
}

std::string residuals_field(const SweepCell& cell) {
  std::string body = "\"[";
  for (std::size_t i = 0; i < cell.residuals.size(); ++i) {
    if (i > 0) body += ',';
    body += format_double(cell.residuals[i]);
  }
  body += "]\"";
  return body;
}

std::string results_csv_text(const SweepResult& result) {
  std::string text;
  text += "# ctmap-sweep 1\n";
  text += "# config_hash " + result.config_hash + "\n";
  text += std::string("# version ") + kVersion + "\n";
  text += kResultsHeader;
  text += '\n';
  for (const SweepCell& cell : result.cells) {
    text += fmt_gamma(cell.gamma);
    text += ',' + std::to_string(cell.dng);
    text += ',' + fmt_threshold(cell.threshold);
    text += ',';
    text += cell.rho_defined ? format_double(cell.rho) : "NA";
    text += ',';
    text += cell.dim_defined ? std::to_string(cell.embedding_dim) : "NA";
    text += ',';
    text += cell.dim_defined ? residuals_field(cell) : "NA";
    text += ',';
    text += cell.wasserstein_defined ? format_double(cell.wasserstein) : "NA";
    text += ',';
    text += cell.has_infinite ? '1' : '0';
    text += '\n';
  }
  return text;
}

std::string timings_csv_text(const SweepResult& result) {
  std::string text = "gamma,dng,T,seconds\n";
  for (const SweepCell& cell : result.cells) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", cell.wallclock_seconds);
    text += fmt_gamma(cell.gamma) + ',' + std::to_string(cell.dng) + ',' +
            fmt_threshold(cell.threshold) + ',' + buf + '\n';
  }
  return text;
}

}  // namespace

void validate(const SweepConfig& cfg) {
  if (cfg.n < 2) throw config_error("lattice side must be at least 2");
  if (cfg.p2 < 1)
    throw config_error("squared geometric radius must be positive");
  if (cfg.dng.empty())
    throw config_error("non-geometric degree list is empty");
  for (const int q : cfg.dng)
    if (q < 0) throw config_error("non-geometric degree must be nonnegative");
  if (cfg.thresholds.empty()) throw config_error("threshold list is empty");
  for (const double t : cfg.thresholds)
    if (!(t >= 0.0 && t <= 1.0))
      throw config_error("threshold outside [0, 1]: " + format_double(t));
  if (cfg.gammas.empty()) throw config_error("gamma list is empty");
  for (const double g : cfg.gammas)
    if (!(g >= 0.0))
      throw config_error("decay exponent must be nonnegative");
  if (!cfg.measures.any()) throw config_error("no measures enabled");
  if (!(cfg.wasserstein_q >= 1.0))
    throw config_error("Wasserstein exponent must be at least 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw config_error("horizon fraction must lie strictly between 0 and 1");
}

std::string config_hash(const SweepConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(science_json(cfg).dump())));
  return buf;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  validate(cfg);

  SweepResult result;
  result.config = cfg;
  result.config_hash = config_hash(cfg);

  const std::size_t n_gamma = cfg.gammas.size();
  const std::size_t n_dng = cfg.dng.size();
  const std::size_t n_thr = cfg.thresholds.size();

  std::vector<Network> networks(n_gamma * n_dng);
  parallel_for_index(networks.size(), cfg.workers, [&](std::size_t i) {
    const double gamma = cfg.gammas[i / n_dng];
    const int q = cfg.dng[i % n_dng];
    const std::uint64_t seed = derive_seed(cfg.rng_seed, gamma_decile(gamma),
                                           static_cast<std::uint64_t>(q));
    networks[i] = build_network(cfg.n, cfg.p2, q, gamma, seed);
  });

  Barcode calib_ref;
  if (cfg.measures.topology)
    calib_ref = calibrate(reference_torus_barcode(cfg.n));

  if (!cfg.out_dir.empty())
    std::filesystem::create_directories(cfg.out_dir);

  result.cells.resize(n_gamma * n_dng * n_thr);
  for (std::size_t gi = 0; gi < n_gamma; ++gi)
    for (std::size_t di = 0; di < n_dng; ++di)
      for (std::size_t ti = 0; ti < n_thr; ++ti) {
        SweepCell& cell = result.cells[(gi * n_dng + di) * n_thr + ti];
        cell.gamma = cfg.gammas[gi];
        cell.dng = cfg.dng[di];
        cell.threshold = cfg.thresholds[ti];
      }

  parallel_for_index(result.cells.size(), cfg.workers, [&](std::size_t c) {
    SweepCell& cell = result.cells[c];
    const Network& net = networks[c / n_thr];
    const auto start = std::chrono::steady_clock::now();

    const ContagionConfig ccfg{cell.threshold};
    ActivationMatrix act;
    if (cfg.out_dir.empty()) {
      act = activation_matrix(net, ccfg);
    } else {
      const std::string path = cache_path(cfg, net, ccfg);
      const CacheLoad load = load_activation_cache(path, net, ccfg, act);
      if (load != CacheLoad::ok) {
        if (load == CacheLoad::mismatch)
          std::cerr << "warning: stale activation cache " << path
                    << "; recomputing\n";
        act = activation_matrix(net, ccfg);
        save_activation_cache(path, net, ccfg, act);
      }
    }

    const PointCloud cloud = build_map<double>(act, cfg.variant);
    cell.has_infinite = cloud.has_infinite;

    if (cfg.measures.geometry) {
      try {
        cell.rho = geometry_score(cloud, cfg.n);
        cell.rho_defined = true;
      } catch (const undefined_correlation_error&) {
        // constant distance lists leave the score undefined; reported as NA
      }
    }
    if (cfg.measures.dimensionality) {
      const EmbeddingReport report = embedding_dimension(cloud);
      cell.embedding_dim = report.P;
      cell.residuals = report.residuals;
      cell.dim_defined = true;
    }
    if (cfg.measures.topology && !cell.has_infinite) {
      try {
        cell.wasserstein =
            topology_score(cloud, calib_ref, cfg.wasserstein_q, cfg.ground);
        cell.wasserstein_defined = true;
      } catch (const calibration_error&) {
        // a cloud whose barcode has no finite bars has no score; NA
      }
    }

    cell.wallclock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
  });

  return result;
}

SweepResult run_gamma_study(const SweepConfig& cfg) {
  if (cfg.gammas.empty())
    throw config_error("gamma study needs a nonempty gamma list");
  if (cfg.dng.size() != 1)
    throw config_error(
        "gamma study varies gamma at a single non-geometric degree");
  return run_sweep(cfg);
}

void write_sweep_outputs(const SweepResult& result) {
  const std::string& dir = result.config.out_dir;
  if (dir.empty()) throw io_error("sweep output directory is not set");
  std::filesystem::create_directories(dir);
  const auto at = [&dir](const char* name) {
    return (std::filesystem::path(dir) / name).string();
  };
  write_text_file(at("results.csv"), results_csv_text(result));
  write_text_file(at("timings.csv"), timings_csv_text(result));

  nlohmann::ordered_json manifest;
  manifest["format"] = "ctmap-manifest";
  manifest["format_version"] = 1;
  manifest["code_version"] = kVersion;
  manifest["config_hash"] = result.config_hash;
  manifest["config"] = science_json(result.config);
  write_text_file(at("manifest.json"), manifest.dump(2) + "\n");
}

SweepResult read_sweep_result(const std::string& dir) {
  const auto at = [&dir](const char* name) {
    return (std::filesystem::path(dir) / name).string();
  };

  std::ifstream mf(at("manifest.json"), std::ios::binary);
  if (!mf) throw io_error("cannot open " + at("manifest.json"));
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("bad manifest in " + dir + ": " + e.what());
  }
  SweepResult result;
  if (!manifest.contains("config"))
    throw io_error("manifest in " + dir + " lacks a config block");
  result.config = config_from_json(manifest.at("config"));
  result.config.out_dir = dir;
  result.config_hash = manifest.value("config_hash", "");

  std::ifstream rf(at("results.csv"), std::ios::binary);
  if (!rf) throw io_error("cannot open " + at("results.csv"));
  std::string line;
  bool header_seen = false;
  while (std::getline(rf, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kResultsHeader)
        throw io_error("unexpected results header: " + line);
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_quoted(line);
    if (fields.size() != 8)
      throw io_error("malformed results row: " + line);
    SweepCell cell;
    cell.gamma = parse_double(fields[0]);
    cell.dng = static_cast<int>(parse_long(fields[1]));
    cell.threshold = parse_double(fields[2]);
    if (fields[3] != "NA") {
      cell.rho = parse_double(fields[3]);
      cell.rho_defined = true;
    }
    if (fields[4] != "NA") {
      cell.embedding_dim = static_cast<int>(parse_long(fields[4]));
      cell.dim_defined = true;
    }
    if (fields[5] != "NA") {
      try {
        for (const auto& r : nlohmann::json::parse(fields[5]))
          cell.residuals.push_back(r.get<double>());
      } catch (const nlohmann::json::exception& e) {
        throw io_error("malformed residual list: " + fields[5] + ": " +
                       e.what());
      }
    }
    if (fields[6] != "NA") {
      cell.wasserstein = parse_double(fields[6]);
      cell.wasserstein_defined = true;
    }
    cell.has_infinite = parse_long(fields[7]) != 0;
    result.cells.push_back(std::move(cell));
  }
  if (!header_seen) throw io_error("no header row in " + at("results.csv"));
  return result;
}

SweepConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad config JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::string config_to_json_text(const SweepConfig& cfg) {
  nlohmann::ordered_json j = science_json(cfg);
  j["out_dir"] = cfg.out_dir;
  j["workers"] = cfg.workers;
  return j.dump(2) + "\n";
}

}  // namespace ctmap
