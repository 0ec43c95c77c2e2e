#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ctmap/geometry.hpp"
#include "ctmap/persistence.hpp"
#include "support/reference.hpp"

using namespace ctmap;

namespace {

DenseMatrix<double> random_points(int count, int dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  DenseMatrix<double> pts(count, dim);
  for (int i = 0; i < count; ++i)
    for (int c = 0; c < dim; ++c) pts(i, c) = uni(gen);
  return pts;
}

Barcode up_to_dimension(const Barcode& b, int max_dim) {
  Barcode out;
  for (const PersistencePair& p : b.pairs)
    if (p.dim <= max_dim) out.pairs.push_back(p);
  out.sort_pairs();
  return out;
}

}  // namespace

TEST_CASE("distance matrices are validated before any reduction") {
  DenseMatrix<double> rect = DenseMatrix<double>::Zero(3, 4);
  CHECK_THROWS_AS(vr_persistence(rect, 1), invalid_metric_error);

  DenseMatrix<double> diag = DenseMatrix<double>::Zero(3, 3);
  diag(1, 1) = 0.5;
  CHECK_THROWS_AS(vr_persistence(diag, 1), invalid_metric_error);

  DenseMatrix<double> negative = DenseMatrix<double>::Zero(3, 3);
  negative(0, 1) = negative(1, 0) = -1.0;
  negative(0, 2) = negative(2, 0) = 1.0;
  negative(1, 2) = negative(2, 1) = 1.0;
  CHECK_THROWS_AS(vr_persistence(negative, 1), invalid_metric_error);

  DenseMatrix<double> skew = DenseMatrix<double>::Zero(3, 3);
  skew(0, 1) = 1.0;
  skew(1, 0) = 1.0 + 1e-9;
  skew(0, 2) = skew(2, 0) = 1.0;
  skew(1, 2) = skew(2, 1) = 1.0;
  CHECK_THROWS_AS(vr_persistence(skew, 1), invalid_metric_error);

  DenseMatrix<double> ok = DenseMatrix<double>::Zero(2, 2);
  ok(0, 1) = ok(1, 0) = 1.0;
  CHECK_THROWS_AS(vr_persistence(ok, -1), config_error);
}

TEST_CASE("tiny spaces produce the expected bars") {
  // A single point: one never-dying component.
  DenseMatrix<double> lone = DenseMatrix<double>::Zero(1, 1);
  const Barcode solo = vr_persistence(lone, 1);
  REQUIRE(solo.pairs.size() == 1);
  CHECK(solo.pairs[0] == PersistencePair{0, 0.0, kInfiniteDeath});

  // Two points at distance 3: the younger component dies at 3.
  DenseMatrix<double> two = DenseMatrix<double>::Zero(2, 2);
  two(0, 1) = two(1, 0) = 3.0;
  const Barcode pair = vr_persistence(two, 1);
  REQUIRE(pair.pairs.size() == 2);
  CHECK(pair.pairs[0] == PersistencePair{0, 0.0, 3.0});
  CHECK(pair.pairs[1] == PersistencePair{0, 0.0, kInfiniteDeath});
  CHECK(pair.infinite_count(0) == 1);

  // An equilateral triangle: the loop fills in the instant it forms.
  DenseMatrix<double> tri = DenseMatrix<double>::Constant(3, 3, 1.0);
  tri.diagonal().setZero();
  const Barcode triangle = vr_persistence(tri, 1);
  CHECK(triangle.dimension_pairs(1).empty());
  REQUIRE(triangle.dimension_pairs(0).size() == 3);
  CHECK(triangle.infinite_count(0) == 1);

  // A unit square: one loop from the sides up to the diagonal.
  DenseMatrix<double> square(4, 4);
  const double s2 = std::sqrt(2.0);
  square << 0, 1, s2, 1,
            1, 0, 1, s2,
            s2, 1, 0, 1,
            1, s2, 1, 0;
  const Barcode sq = vr_persistence(square, 1);
  const auto loops = sq.dimension_pairs(1);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0] == PersistencePair{1, 1.0, s2});
  CHECK(sq.dimension_pairs(0).size() == 4);
}

TEST_CASE("the fast path agrees with a complete-filtration oracle") {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int count = 3 + static_cast<int>(gen() % 6);
    const int dim = 2 + static_cast<int>(gen() % 2);
    const DenseMatrix<double> pts = random_points(count, dim, gen());
    const DenseMatrix<double> dist = pairwise_distance_matrix(pts);
    const Barcode fast = vr_persistence(dist, 1);
    const Barcode full = up_to_dimension(testref::full_persistence(dist), 1);
    CHECK(fast == full);
  }
}

TEST_CASE("the fast path agrees with the oracle on tie-heavy inputs") {
  // integer coordinates on a tiny grid force most distances to repeat,
  // the regime that activation maps produce
  std::mt19937_64 gen(103);
  for (int trial = 0; trial < 150; ++trial) {
    const int count = 5 + static_cast<int>(gen() % 4);
    const int dim = 2 + static_cast<int>(gen() % 2);
    const int levels = 2 + static_cast<int>(gen() % 2);
    DenseMatrix<double> pts(count, dim);
    for (int i = 0; i < count; ++i)
      for (int c = 0; c < dim; ++c)
        pts(i, c) = static_cast<double>(gen() % levels);
    const DenseMatrix<double> dist = pairwise_distance_matrix(pts);
    const Barcode fast = vr_persistence(dist, 1);
    const Barcode full = up_to_dimension(testref::full_persistence(dist), 1);
    CHECK(fast == full);
  }
}

TEST_CASE("the generic path agrees with the oracle in higher dimensions") {
  std::mt19937_64 gen(103);
  for (int trial = 0; trial < 60; ++trial) {
    const int count = 4 + static_cast<int>(gen() % 5);
    const int max_dim = 2 + static_cast<int>(trial % 2);
    const DenseMatrix<double> pts = random_points(count, 3, gen());
    const DenseMatrix<double> dist = pairwise_distance_matrix(pts);
    const Barcode computed = vr_persistence(dist, max_dim);
    const Barcode full =
        up_to_dimension(testref::full_persistence(dist), max_dim);
    CHECK(computed == full);
  }
}

TEST_CASE("connected components behave like components") {
  std::mt19937_64 gen(107);
  for (int trial = 0; trial < 20; ++trial) {
    const int count = 5 + static_cast<int>(gen() % 4);
    const DenseMatrix<double> pts = random_points(count, 2, gen());
    const Barcode b = vr_persistence(pairwise_distance_matrix(pts), 1);
    const auto comps = b.dimension_pairs(0);
    // Distinct random points: every component is born at zero, exactly
    // one survives, and the finite ones die at positive scales.
    CHECK(comps.size() == static_cast<std::size_t>(count));
    CHECK(b.infinite_count(0) == 1);
    for (const auto& p : comps) {
      CHECK(p.birth == 0.0);
      if (!p.is_infinite()) CHECK(p.death > 0.0);
    }
  }
}

TEST_CASE("doubling the metric doubles every bar") {
  const DenseMatrix<double> pts = random_points(7, 3, 211);
  const DenseMatrix<double> dist = pairwise_distance_matrix(pts);
  const Barcode base = vr_persistence(dist, 1);
  const Barcode doubled = vr_persistence(DenseMatrix<double>(2.0 * dist), 1);
  REQUIRE(doubled.pairs.size() == base.pairs.size());
  for (std::size_t k = 0; k < base.pairs.size(); ++k) {
    CHECK(doubled.pairs[k].dim == base.pairs[k].dim);
    CHECK(doubled.pairs[k].birth == 2.0 * base.pairs[k].birth);
    if (base.pairs[k].is_infinite()) {
      CHECK(doubled.pairs[k].is_infinite());
    } else {
      CHECK(doubled.pairs[k].death == 2.0 * base.pairs[k].death);
    }
  }
}

TEST_CASE("the torus distance matrix matches its embedded cloud") {
  const DenseMatrix<double> direct = torus_distance_matrix(10);
  const DenseMatrix<double> from_cloud =
      pairwise_distance_matrix(torus_embedding_cloud(10));
  REQUIRE(direct.rows() == 100);
  REQUIRE(from_cloud.rows() == 100);
  CHECK((direct - from_cloud).cwiseAbs().maxCoeff() <= 1e-12);
  // Exact symmetry and a zero diagonal, as the reduction requires.
  CHECK(direct.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((direct - direct.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(torus_distance_matrix(1), invalid_lattice_error);
}

TEST_CASE("the reference torus shows two dominant loops") {
  const Barcode ref = reference_torus_barcode(10);
  CHECK(ref.infinite_count(0) == 1);
  CHECK(ref.infinite_count(1) == 0);

  std::vector<double> pers;
  for (const auto& p : ref.finite_pairs(1)) pers.push_back(p.persistence());
  REQUIRE(pers.size() >= 2);
  std::sort(pers.rbegin(), pers.rend());
  if (pers.size() > 2) {
    CHECK(pers[0] >= 3.0 * pers[2]);
    CHECK(pers[1] >= 3.0 * pers[2]);
  }
  // The two main circles have the same length, so the dominant bars
  // nearly coincide.
  CHECK(pers[0] == doctest::Approx(pers[1]).epsilon(1e-9));

  CHECK_THROWS_AS(reference_torus_barcode(5), invalid_lattice_error);
  CHECK_NOTHROW(reference_torus_barcode(6));
}
