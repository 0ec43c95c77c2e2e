#include "ctmap/contagion_map.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ctmap/io_util.hpp"
#include "ctmap/torus_net.hpp"

namespace ctmap {

const char* to_string(MapVariant v) {
  switch (v) {
    case MapVariant::regular: return "regular";
    case MapVariant::reflected: return "reflected";
    case MapVariant::symmetric: return "symmetric";
  }
  throw config_error("unknown map variant");
}

MapVariant map_variant_from_string(const std::string& s) {
  if (s == "regular") return MapVariant::regular;
  if (s == "reflected") return MapVariant::reflected;
  if (s == "symmetric") return MapVariant::symmetric;
  throw config_error("unknown map variant: " + s);
}

void save_point_cloud(const std::string& path, const PointCloud& cloud) {
  const Eigen::Index n_points = cloud.num_points();
  const int n = static_cast<int>(std::llround(std::sqrt(double(n_points))));
  if (static_cast<Eigen::Index>(n) * n != n_points) {
    throw shape_error("point cloud rows must fill an n x n lattice");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("cannot open point cloud file for writing: " + path);
  os << "# ctmap-point-cloud 1\n";
  os << "# variant " << to_string(cloud.variant) << "\n";
  os << "# has_infinite " << (cloud.has_infinite ? 1 : 0) << "\n";
  os << "# n " << n << "\n";
  for (Eigen::Index id = 0; id < n_points; ++id) {
    os << node_x(static_cast<NodeIndex>(id), n) << ','
       << node_y(static_cast<NodeIndex>(id), n);
    for (Eigen::Index c = 0; c < cloud.dimension(); ++c) {
      os << ',' << format_double(cloud.points(id, c));
    }
    os << '\n';
  }
  if (!os) throw io_error("failed writing point cloud file: " + path);
}

PointCloud load_point_cloud(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open point cloud file: " + path);

  std::string line;
  auto next_line = [&]() {
    if (!std::getline(is, line)) {
      throw io_error("truncated point cloud file: " + path);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line();
  if (line != "# ctmap-point-cloud 1") {
    throw io_error("not a point cloud file: " + path);
  }
  PointCloud cloud;
  next_line();
  if (line.rfind("# variant ", 0) != 0) {
    throw io_error("point cloud file missing variant line: " + path);
  }
  cloud.variant = map_variant_from_string(line.substr(10));
  next_line();
  if (line.rfind("# has_infinite ", 0) != 0) {
    throw io_error("point cloud file missing has_infinite line: " + path);
  }
  cloud.has_infinite = parse_long(std::string_view(line).substr(15)) != 0;
  next_line();
  if (line.rfind("# n ", 0) != 0) {
    throw io_error("point cloud file missing lattice size line: " + path);
  }
  const long n = parse_long(std::string_view(line).substr(4));
  if (n < 2) throw io_error("invalid lattice size in point cloud file");
  const Eigen::Index n_points = static_cast<Eigen::Index>(n) * n;

  Eigen::Index dim = -1;
  for (Eigen::Index id = 0; id < n_points; ++id) {
    next_line();
    const auto fields = split_csv(line);
    if (fields.size() < 3) {
      throw io_error("point cloud row has too few fields: " + path);
    }
    if (dim < 0) {
      dim = static_cast<Eigen::Index>(fields.size()) - 2;
      cloud.points.resize(n_points, dim);
    } else if (static_cast<Eigen::Index>(fields.size()) - 2 != dim) {
      throw io_error("point cloud rows have inconsistent widths: " + path);
    }
    const long x = parse_long(fields[0]);
    const long y = parse_long(fields[1]);
    if (node_id(static_cast<int>(x), static_cast<int>(y),
                static_cast<int>(n)) != static_cast<NodeIndex>(id)) {
      throw io_error("point cloud rows out of lattice order: " + path);
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      cloud.points(id, c) = parse_double(fields[static_cast<std::size_t>(c) + 2]);
    }
  }
  return cloud;
}

}  // namespace ctmap
