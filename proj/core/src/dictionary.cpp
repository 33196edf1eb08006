#include "bsaomp/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bsaomp {

PhysicalGrid::PhysicalGrid(int size) {
  if (size < 2) {
    throw std::invalid_argument("physical grid needs at least 2 points, got " + std::to_string(size));
  }
  points_.resize(static_cast<std::size_t>(size));
  const double step = 2.0 / (size - 1);
  for (int q = 0; q < size; ++q) {
    // Fill symmetrically so that points_[q] == -points_[Q-1-q] bit for bit.
    const int mirror = size - 1 - q;
    if (q <= mirror) {
      const double v = -1.0 + step * q;
      points_[static_cast<std::size_t>(q)] = (2 * q == size - 1) ? 0.0 : v;
    } else {
      points_[static_cast<std::size_t>(q)] = -points_[static_cast<std::size_t>(mirror)];
    }
  }
  points_.front() = -1.0;
  points_.back() = 1.0;
}

int PhysicalGrid::nearest(double value) const {
  const double pos = (value + 1.0) / spacing();
  int q = static_cast<int>(std::floor(pos));
  q = std::clamp(q, 0, size() - 1);
  int best = q;
  double best_err = std::abs(points_[static_cast<std::size_t>(q)] - value);
  for (int c = std::max(0, q - 1); c <= std::min(size() - 1, q + 1); ++c) {
    const double err = std::abs(points_[static_cast<std::size_t>(c)] - value);
    if (err < best_err) {
      best = c;
      best_err = err;
    }
  }
  return best;
}

PhysicalGrid build_physical_grid(int size) { return PhysicalGrid(size); }

BsaDictionary::BsaDictionary(const SystemConfig& cfg, PhysicalGrid grid, Kind kind)
    : cfg_(cfg), grid_(std::move(grid)), kind_(kind) {}

double BsaDictionary::atom_scale(int m) const {
  const double eta = relative_frequency(cfg_, m);
  return kind_ == Kind::beam_split_aware ? eta : 1.0;
}

CVector BsaDictionary::rx_atom(int m, int q) const {
  return steering_vector(atom_scale(m) * grid_[q], cfg_.ue_antennas);
}

CVector BsaDictionary::tx_atom(int m, int q) const {
  return steering_vector(atom_scale(m) * grid_[q], cfg_.bs_antennas);
}

DictionarySlice BsaDictionary::slice(int m) const {
  DictionarySlice s;
  s.subcarrier = m;
  s.relative_frequency = atom_scale(m);
  const int Q = grid_.size();
  s.rx_atoms.resize(cfg_.ue_antennas, Q);
  s.tx_atoms.resize(cfg_.bs_antennas, Q);
  for (int q = 0; q < Q; ++q) {
    const double spatial = s.relative_frequency * grid_[q];
    s.rx_atoms.col(q) = steering_vector(spatial, cfg_.ue_antennas);
    s.tx_atoms.col(q) = steering_vector(spatial, cfg_.bs_antennas);
  }
  return s;
}

DictionarySlice build_dictionary(const SystemConfig& cfg, const PhysicalGrid& grid, int m) {
  return BsaDictionary(cfg, grid).slice(m);
}

PhysicalDirection physical_from_atom(int q, const PhysicalGrid& grid) {
  if (q < 0 || q >= grid.size()) {
    throw std::out_of_range("atom index " + std::to_string(q) + " outside grid");
  }
  return PhysicalDirection(grid[q]);
}

}  // namespace bsaomp
