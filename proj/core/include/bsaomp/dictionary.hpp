#pragma once

#include <vector>

#include "bsaomp/array_model.hpp"
#include "bsaomp/types.hpp"

namespace bsaomp {

/// Q physical directions, uniformly spaced on [-1, 1] with both endpoints
/// included (spacing 2/(Q-1)).
class PhysicalGrid {
 public:
  explicit PhysicalGrid(int size);

  int size() const { return static_cast<int>(points_.size()); }
  double spacing() const { return 2.0 / (size() - 1); }
  double operator[](int q) const { return points_.at(static_cast<std::size_t>(q)); }
  const std::vector<double>& points() const { return points_; }

  /// Index of the grid point closest to `value`; ties resolve to the lower index.
  int nearest(double value) const;

 private:
  std::vector<double> points_;
};

PhysicalGrid build_physical_grid(int size);

/// Steering-atom matrices for one subcarrier. Column q of both matrices
/// encodes the physical direction grid[q] as it appears at this subcarrier.
struct DictionarySlice {
  int subcarrier = 0;
  double relative_frequency = 1.0;
  CMatrix rx_atoms;  // N-bar x Q
  CMatrix tx_atoms;  // N x Q
};

/// Beam-split-aware dictionary over a shared physical grid. Slices are built
/// on demand so only N*Q + N-bar*Q entries per subcarrier are ever resident.
///
/// A frequency-flat dictionary (the classical construction) is the same
/// object with eta_m pinned to 1 for every subcarrier.
class BsaDictionary {
 public:
  enum class Kind { beam_split_aware, frequency_flat };

  BsaDictionary(const SystemConfig& cfg, PhysicalGrid grid, Kind kind = Kind::beam_split_aware);

  const SystemConfig& config() const { return cfg_; }
  const PhysicalGrid& grid() const { return grid_; }
  Kind kind() const { return kind_; }
  int grid_size() const { return grid_.size(); }

  /// eta_m seen by this dictionary (1 for the frequency-flat variant).
  double atom_scale(int m) const;

  DictionarySlice slice(int m) const;
  CVector rx_atom(int m, int q) const;
  CVector tx_atom(int m, int q) const;

 private:
  SystemConfig cfg_;
  PhysicalGrid grid_;
  Kind kind_;
};

DictionarySlice build_dictionary(const SystemConfig& cfg, const PhysicalGrid& grid, int m);

/// Physical direction encoded by atom q; the same for every subcarrier.
PhysicalDirection physical_from_atom(int q, const PhysicalGrid& grid);

}  // namespace bsaomp
