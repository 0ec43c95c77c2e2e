// PCA projection and the residual-variance rule for the approximate
// embedding dimension: P is the smallest p whose projection keeps the
// pairwise-distance correlation high enough that R_p = 1 - rho^2 drops
// below 5 percent, capped at 100.
#pragma once

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "ctmap/contagion_map.hpp"
#include "ctmap/geometry.hpp"
#include "ctmap/rng.hpp"
#include "ctmap/types.hpp"

namespace ctmap {

inline constexpr int kEmbeddingCap = 100;
inline constexpr double kResidualTarget = 0.05;

struct EmbeddingReport {
  int P = 0;
  std::vector<double> residuals;  // R_p for p = 1..P
  bool subsampled = false;        // pair-set policy actually used
};

namespace detail {

// Pair budget: every unordered pair up to 900 points, otherwise a
// fixed-seed sample of one million pairs drawn with replacement. The
// sample depends only on the point count, so every R_p of one search
// and both sides of a residual computation see the same pairs.
inline constexpr Eigen::Index kFullPairPointLimit = 900;
inline constexpr std::size_t kPairSampleSize = 1000000;
inline constexpr std::uint64_t kPairSampleTag = 0x64696d;

inline std::vector<std::pair<std::uint32_t, std::uint32_t>>
distance_pair_sample(Eigen::Index n_points, bool& subsampled) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  if (n_points <= kFullPairPointLimit) {
    subsampled = false;
    pairs.reserve(static_cast<std::size_t>(n_points) *
                  static_cast<std::size_t>(n_points - 1) / 2);
    for (Eigen::Index j = 1; j < n_points; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        pairs.emplace_back(static_cast<std::uint32_t>(i),
                           static_cast<std::uint32_t>(j));
      }
    }
  } else {
    subsampled = true;
    Rng rng(derive_seed(kPairSampleTag,
                        static_cast<std::uint64_t>(n_points), 0));
    pairs.reserve(kPairSampleSize);
    for (std::size_t k = 0; k < kPairSampleSize; ++k) {
      auto i = static_cast<std::uint32_t>(
          rng.below(static_cast<std::uint64_t>(n_points)));
      auto j = static_cast<std::uint32_t>(
          rng.below(static_cast<std::uint64_t>(n_points - 1)));
      if (j >= i) ++j;
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  return pairs;
}

// Distances for the given pairs, coordinates accumulated in ascending
// column order so results match the incremental search exactly.
inline std::vector<double> pairwise_distances(
    const DenseMatrix<double>& pts,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
  std::vector<double> out(pairs.size());
  const Eigen::Index dim = pts.cols();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const Eigen::Index i = pairs[k].first;
    const Eigen::Index j = pairs[k].second;
    double s = 0.0;
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double d = pts(i, c) - pts(j, c);
      s += d * d;
    }
    out[k] = std::sqrt(s);
  }
  return out;
}

// Principal directions of the centered cloud, columns ordered by
// singular value descending. Each direction is flipped, if needed, so
// its largest-magnitude component is positive; this pins the otherwise
// arbitrary SVD signs and makes projections reproducible.
inline void principal_directions(const DenseMatrix<double>& centered,
                                 DenseMatrix<double>& directions) {
  Eigen::BDCSVD<DenseMatrix<double>> svd(centered, Eigen::ComputeThinV);
  directions = svd.matrixV();
  for (Eigen::Index k = 0; k < directions.cols(); ++k) {
    Eigen::Index top = 0;
    for (Eigen::Index r = 1; r < directions.rows(); ++r) {
      if (std::abs(directions(r, k)) > std::abs(directions(top, k))) top = r;
    }
    if (directions(top, k) < 0.0) directions.col(k) = -directions.col(k);
  }
}

}  // namespace detail

// Center the cloud and keep the top-p principal coordinates.
template <typename Scalar>
PointCloudT<Scalar> pca_project(const PointCloudT<Scalar>& cloud, int p) {
  const Eigen::Index n_points = cloud.num_points();
  const Eigen::Index dim = cloud.dimension();
  if (p < 1 || static_cast<Eigen::Index>(p) > std::min(n_points, dim)) {
    throw dimension_error("projection dimension out of range");
  }
  const DenseMatrix<double> data = cloud.points.template cast<double>();
  const DenseMatrix<double> centered =
      data.rowwise() - data.colwise().mean();
  DenseMatrix<double> directions;
  detail::principal_directions(centered, directions);
  PointCloudT<Scalar> proj;
  proj.variant = cloud.variant;
  proj.has_infinite = cloud.has_infinite;
  proj.points =
      (centered * directions.leftCols(p)).template cast<Scalar>();
  return proj;
}

// R = 1 - rho^2 for the pairwise-distance lists of the two clouds.
template <typename Scalar>
double residual_variance(const PointCloudT<Scalar>& orig,
                         const PointCloudT<Scalar>& proj) {
  if (orig.num_points() != proj.num_points()) {
    throw shape_error("residual variance needs equal point counts");
  }
  bool subsampled = false;
  const auto pairs = detail::distance_pair_sample(orig.num_points(), subsampled);
  const auto da = detail::pairwise_distances(
      orig.points.template cast<double>(), pairs);
  const auto db = detail::pairwise_distances(
      proj.points.template cast<double>(), pairs);
  const double rho = pearson_correlation(da, db);
  return 1.0 - rho * rho;
}

// Ascending search for the smallest p with R_p below the target. The
// squared projected distances grow by one principal coordinate per
// step, so each candidate dimension costs one pass over the pair set.
// A cloud whose directions run out early (rank below the cap) keeps
// its last residual for larger p, since the projection stops changing.
template <typename Scalar>
EmbeddingReport embedding_dimension(const PointCloudT<Scalar>& cloud) {
  const Eigen::Index n_points = cloud.num_points();
  if (n_points < 3) {
    throw shape_error("embedding dimension needs at least three points");
  }
  const DenseMatrix<double> data = cloud.points.template cast<double>();
  const DenseMatrix<double> centered =
      data.rowwise() - data.colwise().mean();
  DenseMatrix<double> directions;
  detail::principal_directions(centered, directions);
  const DenseMatrix<double> scores = centered * directions;

  EmbeddingReport report;
  const auto pairs =
      detail::distance_pair_sample(n_points, report.subsampled);
  const auto orig_d = detail::pairwise_distances(data, pairs);

  std::vector<double> acc(pairs.size(), 0.0);
  std::vector<double> proj_d(pairs.size());
  double last_residual = 1.0;
  for (int p = 1; p <= kEmbeddingCap; ++p) {
    double residual = last_residual;
    if (p <= scores.cols()) {
      const auto col = scores.col(p - 1);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double d = col(pairs[k].first) - col(pairs[k].second);
        acc[k] += d * d;
      }
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        proj_d[k] = std::sqrt(acc[k]);
      }
      try {
        const double rho = pearson_correlation(orig_d, proj_d);
        residual = 1.0 - rho * rho;
      } catch (const undefined_correlation_error&) {
        residual = 1.0;  // degenerate distances carry no geometry
      }
      last_residual = residual;
    }
    report.residuals.push_back(residual);
    report.P = p;
    if (residual < kResidualTarget) break;
  }
  return report;
}

}  // namespace ctmap
