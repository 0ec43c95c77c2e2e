// Persistence barcodes: multisets of (dim, birth, death) intervals,
// death = +infinity for classes that never die, plus the calibration
// step that rescales a barcode so its longest finite bar has
// persistence one.
#pragma once

#include <limits>
#include <string>
#include <vector>

#include "ctmap/types.hpp"

namespace ctmap {

inline constexpr double kInfiniteDeath =
    std::numeric_limits<double>::infinity();

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = kInfiniteDeath;

  bool is_infinite() const { return death == kInfiniteDeath; }
  double persistence() const { return death - birth; }

  friend bool operator==(const PersistencePair&,
                         const PersistencePair&) = default;
};

// Orders by (dim, birth, death); infinite deaths sort last per dim/birth.
bool pair_less(const PersistencePair& a, const PersistencePair& b);

struct Barcode {
  std::vector<PersistencePair> pairs;  // kept sorted by pair_less
  // Cumulative divisor applied by calibrate; 1 for a raw barcode.
  double scale = 1.0;

  void sort_pairs();
  std::vector<PersistencePair> dimension_pairs(int dim) const;
  // Finite bars of one dimension, in barcode order.
  std::vector<PersistencePair> finite_pairs(int dim) const;
  std::size_t infinite_count(int dim) const;

  friend bool operator==(const Barcode&, const Barcode&) = default;
};

// Divide all births and deaths by the maximum finite persistence. The
// scaled death is stored as birth' + persistence', which makes the
// longest finite bar come out with persistence exactly one; a barcode
// already in that state is returned unchanged, so calibration is
// idempotent.
Barcode calibrate(const Barcode& b);

// CSV rows dim,birth,death with "inf" for infinite deaths, preceded by
// comment lines carrying the format tag and the scale divisor.
// Numbers use the shortest round-trip form, so save/load is bit exact.
void save_barcode(const std::string& path, const Barcode& b);
Barcode load_barcode(const std::string& path);

}  // namespace ctmap
