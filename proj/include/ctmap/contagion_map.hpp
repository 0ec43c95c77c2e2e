// Contagion maps: turn an activation matrix into a point cloud with one
// point per node. In the regular variant node i is described by the
// times at which it activates across all N realizations; the reflected
// variant instead describes realization j by the times of all nodes;
// the symmetric variant sums the two views.
#pragma once

#include <string>

#include "ctmap/contagion.hpp"
#include "ctmap/types.hpp"

namespace ctmap {

enum class MapVariant { regular, reflected, symmetric };

const char* to_string(MapVariant v);
MapVariant map_variant_from_string(const std::string& s);

template <typename Scalar>
struct PointCloudT {
  DenseMatrix<Scalar> points;  // one point per row
  MapVariant variant = MapVariant::regular;
  // True when some node never activated in some realization, i.e. the
  // activation matrix contains the sentinel. Such coordinates dominate
  // every distance, so downstream scores treat the cloud as degenerate.
  bool has_infinite = false;

  Eigen::Index num_points() const { return points.rows(); }
  Eigen::Index dimension() const { return points.cols(); }
};

using PointCloud = PointCloudT<double>;

template <typename Scalar>
PointCloudT<Scalar> build_map(const ActivationMatrix& m, MapVariant variant) {
  if (m.rows() != m.cols()) {
    throw shape_error("activation matrix must be square");
  }
  const std::int32_t sentinel = activation_sentinel(static_cast<int>(m.rows()));
  PointCloudT<Scalar> cloud;
  cloud.variant = variant;
  cloud.has_infinite = (m.array() == sentinel).any();
  switch (variant) {
    case MapVariant::regular:
      cloud.points = m.transpose().template cast<Scalar>();
      break;
    case MapVariant::reflected:
      cloud.points = m.template cast<Scalar>();
      break;
    case MapVariant::symmetric:
      cloud.points = (m + ActivationMatrix(m.transpose())).template cast<Scalar>();
      break;
  }
  return cloud;
}

// CSV with comment header lines (format tag, variant, has_infinite,
// lattice side) followed by one row per node: node_x,node_y,coords.
// Numbers use the shortest round-trip form, so save/load is bit exact.
void save_point_cloud(const std::string& path, const PointCloud& cloud);
PointCloud load_point_cloud(const std::string& path);

}  // namespace ctmap
