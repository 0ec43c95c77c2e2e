// Shared aliases and the exception hierarchy used across the library.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ctmap {

using NodeIndex = std::uint32_t;
using EdgeList = std::vector<std::pair<NodeIndex, NodeIndex>>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Base class for all library errors; subclasses exist so callers can
// distinguish bad inputs from runtime failures.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lattice side or geometric radius outside the usable range.
class invalid_lattice_error : public error {
 public:
  using error::error;
};

// Network assembly failed (stub parity, degree bounds, matching restarts).
class construction_error : public error {
 public:
  using error::error;
};

// A matrix or point set has the wrong dimensions for the operation.
class shape_error : public error {
 public:
  using error::error;
};

// Pearson correlation requested on a constant (zero-variance) list.
class undefined_correlation_error : public error {
 public:
  using error::error;
};

// Projection dimension outside [1, min(points, coords)].
class dimension_error : public error {
 public:
  using error::error;
};

// Distance matrix is not a valid metric input (asymmetric, negative,
// or nonzero diagonal).
class invalid_metric_error : public error {
 public:
  using error::error;
};

// Barcode calibration requested on a barcode with no finite bar.
class calibration_error : public error {
 public:
  using error::error;
};

// Wasserstein distance requested between barcodes whose infinite-bar
// counts differ in the compared dimension.
class incomparable_diagrams_error : public error {
 public:
  using error::error;
};

// Closed-form curve evaluated outside its analytic domain.
class domain_error : public error {
 public:
  using error::error;
};

// Invalid or inconsistent run configuration.
class config_error : public error {
 public:
  using error::error;
};

// File could not be read, written, or parsed.
class io_error : public error {
 public:
  using error::error;
};

}  // namespace ctmap
