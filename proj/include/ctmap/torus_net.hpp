// Small-world networks on a periodic n x n lattice: deterministic
// geometric edges inside a squared radius, plus q random long-range
// edges per node whose partner choice decays with lattice distance.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctmap/types.hpp"

namespace ctmap {

// Nodes are addressed either by (x, y) lattice coordinates or by the
// flattened index y * n + x.
inline NodeIndex node_id(int x, int y, int n) {
  return static_cast<NodeIndex>(y) * static_cast<NodeIndex>(n) +
         static_cast<NodeIndex>(x);
}
inline int node_x(NodeIndex id, int n) { return static_cast<int>(id) % n; }
inline int node_y(NodeIndex id, int n) { return static_cast<int>(id) / n; }

struct Network {
  int n = 0;             // lattice side
  int p2 = 0;            // squared geometric radius (integer exact)
  int q = 0;             // long-range edges per node
  int gamma10 = 0;       // decay exponent scaled by ten (exact in headers)
  std::uint64_t seed = 0;
  EdgeList geometric_edges;     // canonical (a < b), sorted
  EdgeList nongeometric_edges;  // canonical (a < b), sorted
  std::vector<std::vector<NodeIndex>> adjacency;  // sorted neighbor lists

  int num_nodes() const { return n * n; }
  double gamma() const { return gamma10 / 10.0; }
  int geometric_degree() const;

  bool operator==(const Network& other) const {
    return n == other.n && p2 == other.p2 && q == other.q &&
           gamma10 == other.gamma10 && seed == other.seed &&
           geometric_edges == other.geometric_edges &&
           nongeometric_edges == other.nongeometric_edges;
  }
};

// L1 distance on the torus: per-axis residue folded to min(m, n - m),
// summed over both axes. Throws invalid_lattice_error for n < 2.
int periodic_lattice_distance(int n, int ax, int ay, int bx, int by);

// All (dx, dy) != (0, 0) with dx^2 + dy^2 <= p2, sorted by (dx, dy).
// The count is the geometric degree: 4, 8, 12 for p2 = 1, 2, 4.
std::vector<std::pair<int, int>> geometric_neighbor_offsets(int p2);

// Builds the full network. The decay exponent is quantized to a
// resolution of 0.1 so that a serialized header reconstructs the exact
// network. Long-range partners are matched stub-by-stub in shuffled
// order, weighted by lattice distance to the power of minus gamma,
// excluding self, geometric neighbors, and repeated partners; a
// dead-ended matching restarts from a derived seed, up to max_restarts
// attempts. Equal inputs give bit-identical networks.
Network build_network(int n, int p2, int q, double gamma, std::uint64_t seed,
                      int max_restarts = 100);

// Versioned text format: one header line with (n, p2, q, gamma10, seed)
// followed by the tagged geometric and long-range edge sections. Since
// every field is an integer and edges are stored sorted, the format
// round-trips bit-exactly.
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace ctmap
