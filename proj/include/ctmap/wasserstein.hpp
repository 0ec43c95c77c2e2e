// q-Wasserstein distances between persistence diagrams with diagonal
// augmentation, plus the torus-likeness score that compares a point
// cloud's calibrated dimension-1 barcode against a reference barcode.
#pragma once

#include <string>

#include "ctmap/barcode.hpp"
#include "ctmap/contagion_map.hpp"

namespace ctmap {

// Ground metric on the birth/death plane. The diagonal projection of a
// bar costs half its persistence under linf and persistence/sqrt(2)
// under l2.
enum class GroundMetric { linf, l2 };

const char* to_string(GroundMetric g);
GroundMetric ground_metric_from_string(const std::string& s);

// Optimal-transport distance between the dimension-dim parts of two
// barcodes: every finite bar is matched to a bar of the other diagram
// or to its own diagonal projection, the q-th powers of the ground
// costs are summed over an exactly optimal assignment, infinite bars
// are matched to each other by sorted birth contributing |b1-b2|^q,
// and the q-th root of the sum is returned. Requires q >= 1 and equal
// infinite-bar counts in the chosen dimension.
double wasserstein(const Barcode& a, const Barcode& b, int dim, double q = 2.0,
                   GroundMetric ground = GroundMetric::linf);

// Wasserstein distance between the calibrated dimension-1 barcode of
// the cloud and the calibrated reference; smaller means more similar
// topology.
double topology_score(const PointCloud& cloud, const Barcode& ref,
                      double q = 2.0, GroundMetric ground = GroundMetric::linf);

}  // namespace ctmap
