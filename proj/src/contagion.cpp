#include "ctmap/contagion.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "ctmap/parallel.hpp"

namespace ctmap {

int ContagionConfig::threshold_milli() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw config_error("contagion threshold must lie in [0, 1]");
  }
  return static_cast<int>(std::lround(threshold * 1000.0));
}

std::vector<NodeIndex> cluster_seed(const Network& net, NodeIndex j) {
  if (j >= static_cast<NodeIndex>(net.num_nodes())) {
    throw shape_error("cluster seed node out of range");
  }
  std::vector<NodeIndex> seed = net.adjacency[j];
  seed.push_back(j);
  std::sort(seed.begin(), seed.end());
  return seed;
}

std::vector<std::int32_t> run_contagion(const Network& net,
                                        const std::vector<NodeIndex>& seed,
                                        const ContagionConfig& cfg) {
  const int n_nodes = net.num_nodes();
  const long t1000 = cfg.threshold_milli();
  const std::int32_t sentinel = activation_sentinel(n_nodes);

  std::vector<std::int32_t> time(n_nodes, sentinel);
  std::vector<std::int32_t> active_neighbors(n_nodes, 0);
  std::vector<NodeIndex> newly;
  newly.reserve(seed.size());
  for (NodeIndex s : seed) {
    if (s >= static_cast<NodeIndex>(n_nodes)) {
      throw shape_error("seed node out of range");
    }
    if (time[s] == sentinel) {
      time[s] = 0;
      newly.push_back(s);
    }
  }

  // Only nodes whose active-neighbor count changed in the previous step
  // can newly pass the threshold, so each step needs to examine just the
  // inactive neighbors of the last wave.
  std::vector<NodeIndex> frontier;
  std::vector<char> queued(n_nodes, 0);
  for (std::int32_t step = 1; !newly.empty(); ++step) {
    frontier.clear();
    for (NodeIndex u : newly) {
      for (NodeIndex v : net.adjacency[u]) {
        ++active_neighbors[v];
        if (time[v] == sentinel && !queued[v]) {
          queued[v] = 1;
          frontier.push_back(v);
        }
      }
    }
    newly.clear();
    for (NodeIndex v : frontier) {
      queued[v] = 0;
      const auto deg = static_cast<long>(net.adjacency[v].size());
      // Strict rule: the active fraction must exceed T, evaluated in
      // integers as 1000*active > T1000*degree.
      if (1000L * active_neighbors[v] > t1000 * deg) {
        time[v] = step;
        newly.push_back(v);
      }
    }
  }
  return time;
}

ActivationMatrix activation_matrix(const Network& net,
                                   const ContagionConfig& cfg, int workers) {
  const int n_nodes = net.num_nodes();
  cfg.threshold_milli();  // validate before any worker starts
  ActivationMatrix m(n_nodes, n_nodes);
  parallel_for_index(static_cast<std::size_t>(n_nodes), workers,
                     [&](std::size_t j) {
                       const auto row = run_contagion(
                           net, cluster_seed(net, static_cast<NodeIndex>(j)),
                           cfg);
                       for (int i = 0; i < n_nodes; ++i) {
                         m(static_cast<Eigen::Index>(j), i) = row[i];
                       }
                     });
  return m;
}

namespace {

constexpr char kCacheMagic[8] = {'C', 'T', 'M', 'A', 'P', 'A', 'C', 'T'};
constexpr std::uint32_t kCacheVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
}

bool get_u32(std::istream& is, std::uint32_t& v) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
  v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return true;
}

bool get_u64(std::istream& is, std::uint64_t& v) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return true;
}

std::string cache_header(const Network& net, const ContagionConfig& cfg) {
  std::string buf;
  buf.append(kCacheMagic, sizeof(kCacheMagic));
  put_u32(buf, kCacheVersion);
  put_u32(buf, static_cast<std::uint32_t>(net.n));
  put_u32(buf, static_cast<std::uint32_t>(net.p2));
  put_u32(buf, static_cast<std::uint32_t>(net.q));
  put_u32(buf, static_cast<std::uint32_t>(net.gamma10));
  put_u64(buf, net.seed);
  put_u32(buf, static_cast<std::uint32_t>(cfg.threshold_milli()));
  return buf;
}

}  // namespace

void save_activation_cache(const std::string& path, const Network& net,
                           const ContagionConfig& cfg,
                           const ActivationMatrix& m) {
  const int n_nodes = net.num_nodes();
  if (m.rows() != n_nodes || m.cols() != n_nodes) {
    throw shape_error("activation matrix does not match the network size");
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot open activation cache for writing: " + tmp);
    const std::string header = cache_header(net, cfg);
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::string row;
    for (int j = 0; j < n_nodes; ++j) {
      row.clear();
      for (int i = 0; i < n_nodes; ++i) {
        put_u32(row, static_cast<std::uint32_t>(m(j, i)));
      }
      os.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!os) throw io_error("failed writing activation cache: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw io_error("failed to move activation cache into place: " + path);
  }
}

CacheLoad load_activation_cache(const std::string& path, const Network& net,
                                const ContagionConfig& cfg,
                                ActivationMatrix& out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return CacheLoad::missing;

  char magic[8];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    return CacheLoad::mismatch;
  }
  std::uint32_t version = 0, n = 0, p2 = 0, q = 0, gamma10 = 0, t1000 = 0;
  std::uint64_t seed = 0;
  if (!get_u32(is, version) || !get_u32(is, n) || !get_u32(is, p2) ||
      !get_u32(is, q) || !get_u32(is, gamma10) || !get_u64(is, seed) ||
      !get_u32(is, t1000)) {
    return CacheLoad::mismatch;
  }
  if (version != kCacheVersion || n != static_cast<std::uint32_t>(net.n) ||
      p2 != static_cast<std::uint32_t>(net.p2) ||
      q != static_cast<std::uint32_t>(net.q) ||
      gamma10 != static_cast<std::uint32_t>(net.gamma10) ||
      seed != net.seed ||
      t1000 != static_cast<std::uint32_t>(cfg.threshold_milli())) {
    return CacheLoad::mismatch;
  }

  const int n_nodes = net.num_nodes();
  out.resize(n_nodes, n_nodes);
  std::vector<unsigned char> row(static_cast<std::size_t>(n_nodes) * 4);
  for (int j = 0; j < n_nodes; ++j) {
    if (!is.read(reinterpret_cast<char*>(row.data()),
                 static_cast<std::streamsize>(row.size()))) {
      return CacheLoad::mismatch;  // truncated: recompute
    }
    for (int i = 0; i < n_nodes; ++i) {
      std::uint32_t v = 0;
      for (int b = 0; b < 4; ++b) {
        v |= static_cast<std::uint32_t>(row[4 * i + b]) << (8 * b);
      }
      out(j, i) = static_cast<std::int32_t>(v);
    }
  }
  return CacheLoad::ok;
}

}  // namespace ctmap
