#include "ctmap/torus_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ctmap/rng.hpp"

namespace ctmap {

namespace {

int folded_residue(int d, int n) {
  int m = ((d % n) + n) % n;
  return std::min(m, n - m);
}

// Tag mixed into restart seeds so matching attempts are independent of
// any other use of the base seed.
constexpr std::uint64_t kMatchTag = 0x6e67ULL;

struct MatchScratch {
  std::vector<int> remaining;                  // free stubs per node
  std::vector<std::vector<NodeIndex>> ng_adj;  // partners chosen so far
  std::vector<double> weight;                  // per-candidate weights
  EdgeList edges;
};

bool is_listed(const std::vector<NodeIndex>& sorted_or_small, NodeIndex v) {
  for (NodeIndex u : sorted_or_small)
    if (u == v) return true;
  return false;
}

// One full matching attempt; false means a stub ran out of admissible
// partners and the caller should restart with a fresh seed.
bool try_match(const Network& net, const std::vector<double>& pow_table,
               Rng& rng, MatchScratch& s) {
  const int N = net.num_nodes();
  const int n = net.n;
  const int q = net.q;
  s.edges.clear();
  s.remaining.assign(N, q);
  s.ng_adj.assign(N, {});
  s.weight.assign(N, 0.0);

  std::vector<NodeIndex> owners;
  owners.reserve(static_cast<std::size_t>(N) * q);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < q; ++k) owners.push_back(static_cast<NodeIndex>(i));
  rng.shuffle(owners);

  for (NodeIndex u : owners) {
    if (s.remaining[u] == 0) continue;  // already matched as a partner
    const int ux = node_x(u, n), uy = node_y(u, n);
    double total = 0.0;
    for (int v = 0; v < N; ++v) {
      s.weight[v] = 0.0;
      if (s.remaining[v] == 0 || static_cast<NodeIndex>(v) == u) continue;
      if (is_listed(net.adjacency[u], static_cast<NodeIndex>(v))) continue;
      if (is_listed(s.ng_adj[u], static_cast<NodeIndex>(v))) continue;
      const int mu = folded_residue(ux - node_x(v, n), n) +
                     folded_residue(uy - node_y(v, n), n);
      s.weight[v] = pow_table[mu];
      total += s.weight[v];
    }
    if (total <= 0.0) return false;

    double r = rng.unit() * total;
    int pick = -1;
    for (int v = 0; v < N; ++v) {
      if (s.weight[v] == 0.0) continue;
      pick = v;
      r -= s.weight[v];
      if (r < 0.0) break;  // pick stays at the last candidate on fp spill
    }
    const NodeIndex v = static_cast<NodeIndex>(pick);
    s.edges.emplace_back(std::min(u, v), std::max(u, v));
    --s.remaining[u];
    --s.remaining[v];
    s.ng_adj[u].push_back(v);
    s.ng_adj[v].push_back(u);
  }
  return true;
}

}  // namespace

int Network::geometric_degree() const {
  return static_cast<int>(geometric_neighbor_offsets(p2).size());
}

int periodic_lattice_distance(int n, int ax, int ay, int bx, int by) {
  if (n < 2)
    throw invalid_lattice_error("lattice side must be at least 2, got " +
                                std::to_string(n));
  return folded_residue(ax - bx, n) + folded_residue(ay - by, n);
}

std::vector<std::pair<int, int>> geometric_neighbor_offsets(int p2) {
  if (p2 < 1)
    throw invalid_lattice_error("squared geometric radius must be positive");
  int r = 0;
  while ((r + 1) * (r + 1) <= p2) ++r;
  std::vector<std::pair<int, int>> offsets;
  for (int dx = -r; dx <= r; ++dx)
    for (int dy = -r; dy <= r; ++dy)
      if ((dx != 0 || dy != 0) && dx * dx + dy * dy <= p2)
        offsets.emplace_back(dx, dy);
  return offsets;
}

Network build_network(int n, int p2, int q, double gamma, std::uint64_t seed,
                      int max_restarts) {
  if (n < 2)
    throw invalid_lattice_error("lattice side must be at least 2, got " +
                                std::to_string(n));
  if (q < 0) throw construction_error("long-range degree must be nonnegative");
  if (gamma < 0.0)
    throw construction_error("decay exponent must be nonnegative");

  const auto offsets = geometric_neighbor_offsets(p2);
  int max_off = 0;
  for (const auto& [dx, dy] : offsets)
    max_off = std::max({max_off, std::abs(dx), std::abs(dy)});
  if (n <= 2 * max_off)
    throw invalid_lattice_error(
        "lattice side " + std::to_string(n) +
        " is too small for the geometric radius: opposite wrap-around "
        "images of a neighbor would coincide");

  const long long N = static_cast<long long>(n) * n;
  const int dG = static_cast<int>(offsets.size());
  if ((N * q) % 2 != 0)
    throw construction_error("total stub count n^2*q must be even");
  if (!(q < N - 1 - dG))
    throw construction_error(
        "long-range degree " + std::to_string(q) + " needs q < N-1-dG = " +
        std::to_string(N - 1 - dG));

  Network net;
  net.n = n;
  net.p2 = p2;
  net.q = q;
  net.gamma10 = static_cast<int>(std::lround(gamma * 10.0));
  net.seed = seed;

  // Geometric edges are a deterministic function of (n, p2) alone.
  net.geometric_edges.reserve(static_cast<std::size_t>(N) * dG / 2);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const NodeIndex a = node_id(x, y, n);
      for (const auto& [dx, dy] : offsets) {
        const NodeIndex b =
            node_id(((x + dx) % n + n) % n, ((y + dy) % n + n) % n, n);
        if (a < b) net.geometric_edges.emplace_back(a, b);
      }
    }
  std::sort(net.geometric_edges.begin(), net.geometric_edges.end());

  net.adjacency.assign(static_cast<std::size_t>(N), {});
  for (const auto& [a, b] : net.geometric_edges) {
    net.adjacency[a].push_back(b);
    net.adjacency[b].push_back(a);
  }

  if (q > 0) {
    // Distance weights depend only on the folded L1 distance, which is
    // at most n, so one table serves every pair. The exponent used here
    // is the quantized one, keeping rebuilt-from-header networks exact.
    const double g = net.gamma10 / 10.0;
    std::vector<double> pow_table(static_cast<std::size_t>(n) + 1, 0.0);
    for (int m = 1; m <= n; ++m)
      pow_table[m] = std::pow(static_cast<double>(m), -g);

    MatchScratch scratch;
    bool matched = false;
    for (int attempt = 0; attempt <= max_restarts; ++attempt) {
      Rng rng(derive_seed(seed, kMatchTag, static_cast<std::uint64_t>(attempt)));
      if (try_match(net, pow_table, rng, scratch)) {
        matched = true;
        break;
      }
    }
    if (!matched)
      throw construction_error("stub matching dead-ended in every attempt (" +
                               std::to_string(max_restarts + 1) + " tries)");
    net.nongeometric_edges = std::move(scratch.edges);
    std::sort(net.nongeometric_edges.begin(), net.nongeometric_edges.end());
    for (const auto& [a, b] : net.nongeometric_edges) {
      net.adjacency[a].push_back(b);
      net.adjacency[b].push_back(a);
    }
  }

  for (auto& list : net.adjacency) std::sort(list.begin(), list.end());
  return net;
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: exact LF endings
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << "ctmap-network 1\n";
  out << net.n << ' ' << net.p2 << ' ' << net.q << ' ' << net.gamma10 << ' '
      << net.seed << '\n';
  out << "G " << net.geometric_edges.size() << '\n';
  for (const auto& [a, b] : net.geometric_edges) out << a << ' ' << b << '\n';
  out << "NG " << net.nongeometric_edges.size() << '\n';
  for (const auto& [a, b] : net.nongeometric_edges)
    out << a << ' ' << b << '\n';
  if (!out) throw io_error("write failed for " + path);
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "ctmap-network" || version != 1)
    throw io_error("not a version-1 network file: " + path);

  Network net;
  if (!(in >> net.n >> net.p2 >> net.q >> net.gamma10 >> net.seed))
    throw io_error("bad network header in " + path);
  if (net.n < 2) throw io_error("corrupt lattice side in " + path);
  const NodeIndex N = static_cast<NodeIndex>(net.n) * net.n;

  auto read_section = [&](const char* tag, EdgeList& edges) {
    std::string word;
    std::size_t count = 0;
    if (!(in >> word >> count) || word != tag)
      throw io_error(std::string("missing ") + tag + " section in " + path);
    edges.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      if (!(in >> edges[i].first >> edges[i].second))
        throw io_error(std::string("truncated ") + tag + " section in " + path);
      if (edges[i].first >= N || edges[i].second >= N ||
          edges[i].first == edges[i].second)
        throw io_error(std::string("invalid edge in ") + tag + " section of " +
                       path);
    }
  };
  read_section("G", net.geometric_edges);
  read_section("NG", net.nongeometric_edges);

  net.adjacency.assign(N, {});
  for (const auto& [a, b] : net.geometric_edges) {
    net.adjacency[a].push_back(b);
    net.adjacency[b].push_back(a);
  }
  for (const auto& [a, b] : net.nongeometric_edges) {
    net.adjacency[a].push_back(b);
    net.adjacency[b].push_back(a);
  }
  for (auto& list : net.adjacency) std::sort(list.begin(), list.end());
  return net;
}

}  // namespace ctmap
