// Reference geometry of the n x n torus lattice and the Pearson-based
// geometry score: how well distances in a point cloud track the chordal
// distances of the lattice embedded as a product of two circles.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "ctmap/contagion_map.hpp"
#include "ctmap/torus_net.hpp"
#include "ctmap/types.hpp"

namespace ctmap {

// Offset between two axis coordinates with wrap-around.
inline int axis_distance(int a, int b, int n) {
  int m = a - b;
  if (m < 0) m = -m;
  m %= n;
  return std::min(m, n - m);
}

// Node (x, y) mapped to the product of two circles of radius 1/(2 pi)
// in R^4, so one lattice period is one unit of arc length per factor.
inline Eigen::Vector4d torus_embedding(NodeIndex id, int n) {
  const double tau = 2.0 * std::numbers::pi;
  const double ax = tau * node_x(id, n) / n;
  const double ay = tau * node_y(id, n) / n;
  Eigen::Vector4d v;
  v << std::cos(ax) / tau, std::sin(ax) / tau, std::cos(ay) / tau,
      std::sin(ay) / tau;
  return v;
}

// All n^2 embedded nodes, one row per node in id order.
inline DenseMatrix<double> torus_embedding_cloud(int n) {
  if (n < 2) throw invalid_lattice_error("lattice side must be at least 2");
  const Eigen::Index n_points = static_cast<Eigen::Index>(n) * n;
  DenseMatrix<double> pts(n_points, 4);
  for (Eigen::Index id = 0; id < n_points; ++id) {
    pts.row(id) = torus_embedding(static_cast<NodeIndex>(id), n).transpose();
  }
  return pts;
}

// Euclidean distance in R^4 between the embeddings of nodes i and j,
// in closed form through the per-axis chord lengths.
inline double torus_chordal_distance(NodeIndex i, NodeIndex j, int n) {
  const double pi = std::numbers::pi;
  const int dx = axis_distance(node_x(i, n), node_x(j, n), n);
  const int dy = axis_distance(node_y(i, n), node_y(j, n), n);
  const double sx = std::sin(pi * dx / n);
  const double sy = std::sin(pi * dy / n);
  return std::sqrt(sx * sx + sy * sy) / pi;
}

namespace detail {

// Two-pass centered Pearson correlation, clamped into [-1, 1] so that
// 1 - rho^2 never goes negative from rounding.
inline double pearson(const double* a, const double* b, std::size_t count) {
  if (count < 2) {
    throw undefined_correlation_error(
        "correlation needs at least two samples");
  }
  double min_a = a[0], max_a = a[0], min_b = b[0], max_b = b[0];
  double sum_a = 0.0, sum_b = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    min_a = std::min(min_a, a[k]);
    max_a = std::max(max_a, a[k]);
    min_b = std::min(min_b, b[k]);
    max_b = std::max(max_b, b[k]);
    sum_a += a[k];
    sum_b += b[k];
  }
  if (min_a == max_a || min_b == max_b) {
    throw undefined_correlation_error(
        "correlation undefined for a constant list");
  }
  const double mean_a = sum_a / static_cast<double>(count);
  const double mean_b = sum_b / static_cast<double>(count);
  double caa = 0.0, cbb = 0.0, cab = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double da = a[k] - mean_a;
    const double db = b[k] - mean_b;
    caa += da * da;
    cbb += db * db;
    cab += da * db;
  }
  return std::clamp(cab / std::sqrt(caa * cbb), -1.0, 1.0);
}

}  // namespace detail

inline double pearson_correlation(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw shape_error("correlation lists differ in length");
  }
  return detail::pearson(a.data(), b.data(), a.size());
}

// Pearson correlation between the (N^2-N)/2 pairwise Euclidean
// distances of the cloud and the matching torus chordal distances.
// Every unordered pair contributes; the two distance streams are
// consumed in two fixed-order passes, so nothing is materialized and
// the result is bit-stable.
template <typename Scalar>
double geometry_score(const PointCloudT<Scalar>& cloud, int n) {
  if (n < 2) throw invalid_lattice_error("lattice side must be at least 2");
  const Eigen::Index n_points = cloud.num_points();
  if (n_points != static_cast<Eigen::Index>(n) * n) {
    throw shape_error("geometry score needs one point per lattice node");
  }

  const DenseMatrix<double> pts = cloud.points.template cast<double>();
  const DenseMatrix<double> gram = pts * pts.transpose();
  const DenseVector<double> sq_norm = gram.diagonal();

  // Chordal distances depend only on the folded per-axis offsets.
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

  std::vector<int> xs(static_cast<std::size_t>(n_points));
  std::vector<int> ys(static_cast<std::size_t>(n_points));
  for (Eigen::Index id = 0; id < n_points; ++id) {
    xs[static_cast<std::size_t>(id)] = node_x(static_cast<NodeIndex>(id), n);
    ys[static_cast<std::size_t>(id)] = node_y(static_cast<NodeIndex>(id), n);
  }

  const auto for_each_pair = [&](auto&& visit) {
    for (Eigen::Index j = 1; j < n_points; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const double d2 = sq_norm(i) + sq_norm(j) - 2.0 * gram(i, j);
        const double dc = std::sqrt(std::max(0.0, d2));
        const std::size_t ui = static_cast<std::size_t>(i);
        const std::size_t uj = static_cast<std::size_t>(j);
        const double dt = chord(axis_distance(xs[ui], xs[uj], n),
                                axis_distance(ys[ui], ys[uj], n));
        visit(dc, dt);
      }
    }
  };

  double min_c = 0.0, max_c = 0.0, min_t = 0.0, max_t = 0.0;
  double sum_c = 0.0, sum_t = 0.0;
  bool first = true;
  for_each_pair([&](double dc, double dt) {
    if (first) {
      min_c = max_c = dc;
      min_t = max_t = dt;
      first = false;
    } else {
      min_c = std::min(min_c, dc);
      max_c = std::max(max_c, dc);
      min_t = std::min(min_t, dt);
      max_t = std::max(max_t, dt);
    }
    sum_c += dc;
    sum_t += dt;
  });
  if (first || min_c == max_c || min_t == max_t) {
    throw undefined_correlation_error(
        "geometry score undefined for a degenerate distance list");
  }
  const double pair_count =
      0.5 * static_cast<double>(n_points) * static_cast<double>(n_points - 1);
  const double mean_c = sum_c / pair_count;
  const double mean_t = sum_t / pair_count;

  double ccc = 0.0, ctt = 0.0, cct = 0.0;
  for_each_pair([&](double dc, double dt) {
    const double a = dc - mean_c;
    const double b = dt - mean_t;
    ccc += a * a;
    ctt += b * b;
    cct += a * b;
  });
  return std::clamp(cct / std::sqrt(ccc * ctt), -1.0, 1.0);
}

}  // namespace ctmap
