#include "ctmap/persistence.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ctmap/geometry.hpp"

namespace ctmap {
namespace {

void validate_metric(const DenseMatrix<double>& dist) {
  if (dist.rows() != dist.cols()) {
    throw invalid_metric_error("distance matrix must be square");
  }
  const Eigen::Index n = dist.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) {
      throw invalid_metric_error("distance matrix diagonal must be zero");
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = dist(i, j);
      if (!(d >= 0.0)) {
        throw invalid_metric_error("distances must be nonnegative");
      }
      if (d != dist(j, i)) {
        throw invalid_metric_error("distance matrix must be symmetric");
      }
    }
  }
}

// min over points of the farthest distance from that point: the radius
// at which the complex becomes a cone over the best-placed point.
double enclosing_radius(const DenseMatrix<double>& dist) {
  const Eigen::Index n = dist.rows();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    double row_max = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      row_max = std::max(row_max, dist(i, j));
    }
    best = std::min(best, row_max);
  }
  return best;
}

struct Dsu {
  std::vector<std::int32_t> parent;
  explicit Dsu(std::int32_t n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

struct EdgeRec {
  double value;
  std::int32_t a, b;  // a < b
};

// Z/2Z column addition on sorted index lists.
template <typename Index>
void xor_columns(std::vector<Index>& target, const std::vector<Index>& other,
                 std::vector<Index>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), other.begin(),
                                other.end(), std::back_inserter(scratch));
  target.swap(scratch);
}

struct Simplex {
  double value;
  std::vector<std::int32_t> verts;  // ascending
};

void enumerate_simplices(const DenseMatrix<double>& dist, double r_enc,
                         int max_vertices, std::vector<std::int32_t>& current,
                         double value, std::int32_t next,
                         std::vector<Simplex>& out) {
  const auto n = static_cast<std::int32_t>(dist.rows());
  for (std::int32_t v = next; v < n; ++v) {
    double grown = value;
    bool fits = true;
    for (const std::int32_t u : current) {
      const double d = dist(u, v);
      if (d > r_enc) {
        fits = false;
        break;
      }
      grown = std::max(grown, d);
    }
    if (!fits) continue;
    current.push_back(v);
    out.push_back({grown, current});
    if (static_cast<int>(current.size()) < max_vertices) {
      enumerate_simplices(dist, r_enc, max_vertices, current, grown, v + 1,
                          out);
    }
    current.pop_back();
  }
}

// Dense reduction of the whole filtration, any dimension. Simplex
// counts grow combinatorially, so this path is only for small inputs;
// the pipeline itself never asks for dimensions above 1.
Barcode reduce_full_filtration(const DenseMatrix<double>& dist, int max_dim) {
  const double r_enc = enclosing_radius(dist);
  std::vector<Simplex> simplices;
  std::vector<std::int32_t> current;
  enumerate_simplices(dist, r_enc, max_dim + 2, current, 0.0, 0, simplices);
  std::sort(simplices.begin(), simplices.end(),
            [](const Simplex& x, const Simplex& y) {
              if (x.value != y.value) return x.value < y.value;
              if (x.verts.size() != y.verts.size()) {
                return x.verts.size() < y.verts.size();
              }
              return x.verts < y.verts;
            });

  std::map<std::vector<std::int32_t>, std::int32_t> index_of;
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    index_of[simplices[s].verts] = static_cast<std::int32_t>(s);
  }

  const auto total = static_cast<std::int32_t>(simplices.size());
  std::vector<std::int32_t> pivot_owner(total, -1);
  std::vector<std::vector<std::int32_t>> stored;
  std::vector<char> positive(total, 0), pivot_paired(total, 0);
  std::vector<std::int32_t> col, scratch, facet;

  Barcode out;
  for (std::int32_t s = 0; s < total; ++s) {
    const auto& sx = simplices[s];
    if (sx.verts.size() == 1) {
      positive[s] = 1;
      continue;
    }
    col.clear();
    for (std::size_t drop = 0; drop < sx.verts.size(); ++drop) {
      facet = sx.verts;
      facet.erase(facet.begin() + static_cast<std::ptrdiff_t>(drop));
      col.push_back(index_of.at(facet));
    }
    std::sort(col.begin(), col.end());

    std::int32_t pivot = -1;
    while (!col.empty()) {
      pivot = col.back();
      const std::int32_t owner = pivot_owner[pivot];
      if (owner < 0) break;
      xor_columns(col, stored[owner], scratch);
    }
    if (col.empty()) {
      positive[s] = 1;
      continue;
    }
    pivot_owner[pivot] = static_cast<std::int32_t>(stored.size());
    stored.push_back(col);
    if (!positive[pivot]) {
      throw std::logic_error("reduction paired a negative simplex");
    }
    pivot_paired[pivot] = 1;
    const int bar_dim = static_cast<int>(simplices[pivot].verts.size()) - 1;
    const double birth = simplices[pivot].value;
    const double death = sx.value;
    if (bar_dim <= max_dim && death > birth) {
      out.pairs.push_back({bar_dim, birth, death});
    }
  }
  for (std::int32_t s = 0; s < total; ++s) {
    if (!positive[s] || pivot_paired[s]) continue;
    const int bar_dim = static_cast<int>(simplices[s].verts.size()) - 1;
    if (bar_dim == 0) {
      out.pairs.push_back({0, 0.0, kInfiniteDeath});
    } else if (bar_dim <= max_dim) {
      throw std::logic_error("class survived past the enclosing radius");
    }
    // top-dimension positives have no killers in range; not reported
  }
  out.sort_pairs();
  return out;
}

}  // namespace

Barcode vr_persistence(const DenseMatrix<double>& dist, int max_dim) {
  if (max_dim < 0) {
    throw config_error("maximum homology dimension must be nonnegative");
  }
  validate_metric(dist);
  const auto n = static_cast<std::int32_t>(dist.rows());
  Barcode out;
  if (n == 0) return out;
  if (max_dim >= 2) return reduce_full_filtration(dist, max_dim);

  const double r_enc = enclosing_radius(dist);
  std::vector<EdgeRec> edges;
  for (std::int32_t j = 1; j < n; ++j) {
    for (std::int32_t i = 0; i < j; ++i) {
      if (dist(i, j) <= r_enc) edges.push_back({dist(i, j), i, j});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const EdgeRec& x, const EdgeRec& y) {
    return std::tie(x.value, x.a, x.b) < std::tie(y.value, y.a, y.b);
  });
  const auto num_edges = static_cast<std::int32_t>(edges.size());

  Dsu dsu(n);
  std::vector<char> cycle_edge(num_edges, 0);
  for (std::int32_t r = 0; r < num_edges; ++r) {
    if (dsu.unite(edges[r].a, edges[r].b)) {
      if (edges[r].value > 0.0) out.pairs.push_back({0, 0.0, edges[r].value});
    } else {
      cycle_edge[r] = 1;
    }
  }
  // the cone point connects everything by r_enc, so one class remains
  out.pairs.push_back({0, 0.0, kInfiniteDeath});

  if (max_dim >= 1 && n >= 3) {
    DenseMatrix<std::int32_t> rank = DenseMatrix<std::int32_t>::Constant(n, n, -1);
    for (std::int32_t r = 0; r < num_edges; ++r) {
      rank(edges[r].a, edges[r].b) = r;
      rank(edges[r].b, edges[r].a) = r;
    }
    // Triangles appear at the value of their latest edge; ordering them
    // by that edge's filtration position and then by the opposite
    // vertex gives a total order compatible with filtration values. The
    // pairs are read off the transposed reduction: one column per cycle
    // edge, listing the triangles above it, processed from the late
    // edges to the early ones with the earliest triangle as pivot. That
    // gives the same pairing as a triangle-by-triangle sweep but with a
    // column per edge instead of one per triangle, which keeps
    // tie-heavy inputs tractable (activation maps hold small integer
    // times, so the same distance repeats massively). Tree edges are
    // already paired with vertices, their columns always cancel to
    // nothing, and so they are skipped outright.
    std::unordered_map<std::int64_t, std::int32_t> pivot_owner;
    std::vector<std::vector<std::int64_t>> stored;
    std::vector<std::int64_t> col, scratch;
    for (std::int32_t er = num_edges - 1; er >= 0; --er) {
      if (!cycle_edge[er]) continue;
      const std::int32_t a = edges[er].a;
      const std::int32_t b = edges[er].b;
      col.clear();
      for (std::int32_t k = 0; k < n; ++k) {
        const std::int32_t ra = rank(k, a);
        const std::int32_t rb = rank(k, b);
        if (ra < 0 || rb < 0) continue;
        // identify the cofacet triangle {a, b, k} by latest edge + apex
        std::int32_t top = er;
        std::int32_t apex = k;
        if (ra > top) {
          top = ra;
          apex = b;
        }
        if (rb > top) {
          top = rb;
          apex = a;
        }
        col.push_back(static_cast<std::int64_t>(top) * n + apex);
      }
      std::sort(col.begin(), col.end());
      while (true) {
        if (col.empty()) {
          throw std::logic_error(
              "cycle edge survived past the enclosing radius");
        }
        const std::int64_t pivot = col.front();
        const auto owner = pivot_owner.find(pivot);
        if (owner == pivot_owner.end()) {
          pivot_owner.emplace(pivot, static_cast<std::int32_t>(stored.size()));
          stored.push_back(col);
          const double birth = edges[er].value;
          const double death = edges[static_cast<std::size_t>(pivot / n)].value;
          if (death > birth) out.pairs.push_back({1, birth, death});
          break;
        }
        xor_columns(col, stored[static_cast<std::size_t>(owner->second)],
                    scratch);
      }
    }
  }
  out.sort_pairs();
  return out;
}

DenseMatrix<double> pairwise_distance_matrix(const DenseMatrix<double>& points) {
  const Eigen::Index n = points.rows();
  const Eigen::Index dim = points.cols();
  DenseMatrix<double> dist(n, n);
  dist.setZero();
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < dim; ++c) {
        const double d = points(i, c) - points(j, c);
        s += d * d;
      }
      const double d = std::sqrt(s);
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

DenseMatrix<double> torus_distance_matrix(int n) {
  if (n < 2) throw invalid_lattice_error("lattice side must be at least 2");
  const int half = n / 2;
  const double pi = std::numbers::pi;
  DenseMatrix<double> chord(half + 1, half + 1);
  for (int dx = 0; dx <= half; ++dx) {
    for (int dy = 0; dy <= half; ++dy) {
      const double sx = std::sin(pi * dx / n);
      const double sy = std::sin(pi * dy / n);
      chord(dx, dy) = std::sqrt(sx * sx + sy * sy) / pi;
    }
  }
  const Eigen::Index n_points = static_cast<Eigen::Index>(n) * n;
  DenseMatrix<double> dist(n_points, n_points);
  dist.setZero();
  for (Eigen::Index j = 1; j < n_points; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const auto u = static_cast<NodeIndex>(i);
      const auto v = static_cast<NodeIndex>(j);
      const double d = chord(axis_distance(node_x(u, n), node_x(v, n), n),
                             axis_distance(node_y(u, n), node_y(v, n), n));
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

Barcode reference_torus_barcode(int n) {
  if (n < 6) {
    throw invalid_lattice_error(
        "reference barcode needs a lattice side of at least 6");
  }
  return vr_persistence(torus_distance_matrix(n), 1);
}

}  // namespace ctmap
