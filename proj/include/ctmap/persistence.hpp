// Vietoris-Rips persistent homology over Z/2Z. The fast path covers
// dimensions 0 and 1, which is what the pipeline uses; higher maximum
// dimensions fall back to a dense reduction of the full filtration.
#pragma once

#include "ctmap/barcode.hpp"
#include "ctmap/contagion_map.hpp"
#include "ctmap/types.hpp"

namespace ctmap {

// Barcode of the VR filtration of a finite metric space given by its
// distance matrix. The matrix must be exactly symmetric with a zero
// diagonal and nonnegative entries. Zero-persistence pairs are
// dropped; ties are broken deterministically by endpoint indices.
//
// The filtration is truncated at the enclosing radius min_i max_j
// d(i, j): beyond it some point is within reach of every other, the
// complex is a cone from that point, and no positive-persistence class
// in dimension 1 or above can be born or still be alive. This keeps
// the barcode exact while skipping the long tail of edges.
Barcode vr_persistence(const DenseMatrix<double>& dist, int max_dim);

// Exactly symmetric Euclidean distance matrix of a point cloud,
// coordinates accumulated in ascending order.
DenseMatrix<double> pairwise_distance_matrix(const DenseMatrix<double>& points);

// Chordal distance matrix of the n x n lattice embedded on the torus.
DenseMatrix<double> torus_distance_matrix(int n);

// Dims 0-1 barcode of the regularly spaced torus cloud; its two
// dominant dimension-1 bars are the reference signature that contagion
// maps are scored against.
Barcode reference_torus_barcode(int n);

}  // namespace ctmap
