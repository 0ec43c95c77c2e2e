// Synchronous threshold contagion: a node activates once the fraction
// of its active neighbors strictly exceeds the threshold T. Every node
// seeds one realization (the node plus its whole neighborhood), and the
// stacked activation times form the N x N activation matrix.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctmap/torus_net.hpp"
#include "ctmap/types.hpp"

namespace ctmap {

// Entry (j, i) is the activation time of node i in the realization
// seeded around node j; nodes that never activate carry the sentinel.
using ActivationMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;

// Never-activated marker: strictly larger than any reachable time,
// which is at most N.
inline std::int32_t activation_sentinel(int num_nodes) {
  return static_cast<std::int32_t>(2 * num_nodes);
}

struct ContagionConfig {
  double threshold = 0.0;  // T in [0, 1]

  // The update rule compares neighbor fractions against T through the
  // exact integer predicate 1000*active > T1000*degree, where T1000 is
  // T rounded to a resolution of 0.001. This keeps runs reproducible
  // and matches the fixed-point threshold stored in cache headers.
  int threshold_milli() const;
};

// The seed cluster: node j together with all of its neighbors.
std::vector<NodeIndex> cluster_seed(const Network& net, NodeIndex j);

// One realization. Seed nodes get time 0; each synchronous step
// activates exactly the inactive nodes whose active-neighbor fraction
// strictly exceeds T; the process stops at the first step that
// activates nothing (at most N steps). Never-activated nodes get the
// sentinel.
std::vector<std::int32_t> run_contagion(const Network& net,
                                        const std::vector<NodeIndex>& seed,
                                        const ContagionConfig& cfg);

// All N cluster-seeded realizations, row j seeded around node j.
// Rows are independent, so they may be computed on several workers
// (0 = one per hardware thread); the result does not depend on the
// worker count.
ActivationMatrix activation_matrix(const Network& net,
                                   const ContagionConfig& cfg,
                                   int workers = 1);

// Binary cache with the network header plus the fixed-point threshold,
// followed by the N x N little-endian 32-bit times.
enum class CacheLoad { ok, missing, mismatch };
void save_activation_cache(const std::string& path, const Network& net,
                           const ContagionConfig& cfg,
                           const ActivationMatrix& m);
CacheLoad load_activation_cache(const std::string& path, const Network& net,
                                const ContagionConfig& cfg,
                                ActivationMatrix& out);

}  // namespace ctmap
