#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ctmap/contagion.hpp"
#include "ctmap/contagion_map.hpp"
#include "ctmap/geometry.hpp"
#include "ctmap/torus_net.hpp"
#include "support/reference.hpp"

using namespace ctmap;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvTau = 1.0 / (2.0 * std::numbers::pi);

// Deterministic lattice (no long-range edges), cluster-seeded
// contagion, symmetric map. Shared by the pinned-score tests.
PointCloud lattice_map(int n, int p2, double threshold) {
  const Network net = build_network(n, p2, 0, 2.0, 1);
  const ActivationMatrix act = activation_matrix(net, ContagionConfig{threshold});
  return build_map<double>(act, MapVariant::symmetric);
}

}  // namespace

TEST_CASE("axis distance folds offsets onto the shorter arc") {
  CHECK(axis_distance(0, 0, 10) == 0);
  CHECK(axis_distance(2, 9, 10) == 3);
  CHECK(axis_distance(9, 2, 10) == 3);
  CHECK(axis_distance(0, 5, 10) == 5);
  CHECK(axis_distance(0, 1, 2) == 1);
}

TEST_CASE("embedding maps lattice nodes onto two circles of radius 1/(2 pi)") {
  const Eigen::Vector4d origin = torus_embedding(0, 50);
  CHECK(origin(0) == doctest::Approx(kInvTau).epsilon(1e-15));
  CHECK(origin(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(origin(2) == doctest::Approx(kInvTau).epsilon(1e-15));
  CHECK(origin(3) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));

  // Node (25, 0) on a 50-wide lattice sits halfway around the first circle.
  const NodeIndex opposite = node_id(25, 0, 50);
  const Eigen::Vector4d v = torus_embedding(opposite, 50);
  CHECK(v(0) == doctest::Approx(-kInvTau).epsilon(1e-15));
  CHECK(v(1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(v(2) == doctest::Approx(kInvTau).epsilon(1e-15));
  CHECK(v(3) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));

  for (NodeIndex id = 0; id < 49; ++id) {
    const Eigen::Vector4d w = torus_embedding(id, 7);
    CHECK(w(0) * w(0) + w(1) * w(1) ==
          doctest::Approx(kInvTau * kInvTau).epsilon(1e-12));
    CHECK(w(2) * w(2) + w(3) * w(3) ==
          doctest::Approx(kInvTau * kInvTau).epsilon(1e-12));
  }
}

TEST_CASE("embedding cloud stacks the per-node embeddings in id order") {
  const DenseMatrix<double> pts = torus_embedding_cloud(9);
  REQUIRE(pts.rows() == 81);
  REQUIRE(pts.cols() == 4);
  for (NodeIndex id = 0; id < 81; ++id) {
    const Eigen::Vector4d v = torus_embedding(id, 9);
    for (int c = 0; c < 4; ++c) CHECK(pts(id, c) == v(c));
  }
  CHECK_THROWS_AS(torus_embedding_cloud(1), invalid_lattice_error);
}

TEST_CASE("chordal distance closed form matches the embedded geometry") {
  CHECK(torus_chordal_distance(7, 7, 10) == 0.0);

  // Antipodal along one axis: a full diameter of one circle.
  const NodeIndex half_x = node_id(25, 0, 50);
  CHECK(torus_chordal_distance(0, half_x, 50) ==
        doctest::Approx(1.0 / kPi).epsilon(1e-15));

  // Antipodal along both axes.
  const NodeIndex center = node_id(25, 25, 50);
  CHECK(torus_chordal_distance(0, center, 50) ==
        doctest::Approx(std::sqrt(2.0) / kPi).epsilon(1e-15));

  // The closed form is the Euclidean distance between embeddings.
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 40);
    const auto i = static_cast<NodeIndex>(gen() % (1ULL * n * n));
    const auto j = static_cast<NodeIndex>(gen() % (1ULL * n * n));
    const double direct = torus_chordal_distance(i, j, n);
    const double embedded =
        (torus_embedding(i, n) - torus_embedding(j, n)).norm();
    CHECK(direct == doctest::Approx(embedded).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("chordal distance is a metric on every small lattice") {
  for (int n = 2; n <= 12; ++n) {
    const NodeIndex count = static_cast<NodeIndex>(n) * n;
    std::vector<std::vector<double>> d(count, std::vector<double>(count));
    for (NodeIndex i = 0; i < count; ++i)
      for (NodeIndex j = 0; j < count; ++j)
        d[i][j] = torus_chordal_distance(i, j, n);
    int violations = 0;
    for (NodeIndex i = 0; i < count; ++i) {
      if (d[i][i] != 0.0) ++violations;
      for (NodeIndex j = 0; j < count; ++j) {
        if (d[i][j] != d[j][i]) ++violations;
        if (i != j && !(d[i][j] > 0.0)) ++violations;
      }
    }
    // Triangle inequality with a rounding allowance.
    for (NodeIndex i = 0; i < count; ++i)
      for (NodeIndex j = 0; j < count; ++j)
        for (NodeIndex k = 0; k < count; ++k)
          if (d[i][k] > d[i][j] + d[j][k] + 1e-12) ++violations;
    CHECK(violations == 0);
  }
}

TEST_CASE("correlation handles the textbook cases") {
  CHECK(pearson_correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson_correlation({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));

  const std::vector<double> a{0.3, -1.2, 4.4, 2.0, 0.05};
  CHECK(pearson_correlation(a, a) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(pearson_correlation({1, 1, 1}, {1, 2, 3}),
                  undefined_correlation_error);
  CHECK_THROWS_AS(pearson_correlation({1, 2, 3}, {5, 5, 5}),
                  undefined_correlation_error);
  CHECK_THROWS_AS(pearson_correlation({1.0}, {2.0}), undefined_correlation_error);
  CHECK_THROWS_AS(pearson_correlation({1, 2}, {1, 2, 3}), shape_error);
}

TEST_CASE("correlation is exactly +-1 under affine maps") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(40);
    for (double& v : a) v = uni(gen);
    const double alpha = (trial % 2 == 0) ? 0.75 : -2.5;
    const double beta = uni(gen);
    std::vector<double> b(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) b[k] = alpha * a[k] + beta;
    const double rho = pearson_correlation(a, b);
    const double expected = (alpha > 0) ? 1.0 : -1.0;
    CHECK(std::abs(rho - expected) <= 1e-12);
  }
}

TEST_CASE("correlation matches a one-pass oracle") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> uni(0.0, 10.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> a(100), b(100);
    for (std::size_t k = 0; k < a.size(); ++k) {
      a[k] = uni(gen);
      b[k] = 0.4 * a[k] + uni(gen);
    }
    CHECK(pearson_correlation(a, b) ==
          doctest::Approx(testref::naive_pearson(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("the embedded lattice itself scores a perfect correlation") {
  PointCloud cloud;
  cloud.points = torus_embedding_cloud(20);
  CHECK(geometry_score(cloud, 20) == doctest::Approx(1.0).epsilon(1e-12));

  // Uniform scaling leaves the correlation untouched.
  PointCloud scaled = cloud;
  scaled.points *= 3.7;
  CHECK(geometry_score(scaled, 20) ==
        doctest::Approx(geometry_score(cloud, 20)).epsilon(1e-12));
}

TEST_CASE("geometry score rejects malformed inputs") {
  PointCloud cloud;
  cloud.points = torus_embedding_cloud(5);
  CHECK_THROWS_AS(geometry_score(cloud, 6), shape_error);
  CHECK_THROWS_AS(geometry_score(cloud, 1), invalid_lattice_error);

  PointCloud constant;
  constant.points = DenseMatrix<double>::Zero(25, 3);
  CHECK_THROWS_AS(geometry_score(constant, 5), undefined_correlation_error);
}

TEST_CASE("geometry score equals the materialized-list correlation") {
  const PointCloud cloud = lattice_map(6, 1, 0.2);
  std::vector<double> cloud_d, torus_d;
  const Eigen::Index count = cloud.num_points();
  for (Eigen::Index j = 1; j < count; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      cloud_d.push_back((cloud.points.row(i) - cloud.points.row(j)).norm());
      torus_d.push_back(torus_chordal_distance(static_cast<NodeIndex>(i),
                                               static_cast<NodeIndex>(j), 6));
    }
  }
  CHECK(geometry_score(cloud, 6) ==
        doctest::Approx(testref::naive_pearson(cloud_d, torus_d)).epsilon(1e-12));
}

TEST_CASE("wavefront-regime maps recover the lattice geometry") {
  // Low thresholds spread as a wavefront, so activation times mirror
  // lattice distances and the correlation is nearly perfect.
  CHECK(geometry_score(lattice_map(20, 2, 0.25), 20) >= 0.9);

  const double rho_30 = geometry_score(lattice_map(20, 2, 0.30), 20);
  const double rho_35 = geometry_score(lattice_map(20, 2, 0.35), 20);
  CHECK(rho_30 == doctest::Approx(0.9997579941615964).epsilon(1e-12));
  CHECK(rho_35 == doctest::Approx(0.9997579941615964).epsilon(1e-12));
}

TEST_CASE("stalled maps lose most of the correlation") {
  const Network net = build_network(20, 2, 0, 2.0, 1);
  const ActivationMatrix act_38 = activation_matrix(net, ContagionConfig{0.38});
  const ActivationMatrix act_40 = activation_matrix(net, ContagionConfig{0.40});
  // Both thresholds stall the spread at the same step, so the
  // activation matrices agree entry for entry.
  CHECK((act_38.array() == act_40.array()).all());

  const PointCloud cloud = build_map<double>(act_38, MapVariant::symmetric);
  CHECK(geometry_score(cloud, 20) ==
        doctest::Approx(0.5356698704830171).epsilon(1e-12));
}
