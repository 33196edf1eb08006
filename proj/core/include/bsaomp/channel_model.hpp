#pragma once

#include <cstdint>
#include <vector>

#include "bsaomp/array_model.hpp"
#include "bsaomp/dictionary.hpp"
#include "bsaomp/rng.hpp"
#include "bsaomp/types.hpp"

namespace bsaomp {

enum class GridMode { on_grid, off_grid };

/// One propagation path of one user.
struct Path {
  PhysicalDirection doa;  // receive side (user array)
  PhysicalDirection dod;  // transmit side (base-station array)
  cplx gain{1.0, 0.0};
  double delay_s = 0.0;
  // Grid indices of doa/dod when drawn on-grid, -1 otherwise.
  int doa_index = -1;
  int dod_index = -1;
};

/// Ground-truth multipath geometry: paths[k] holds the L paths of user k.
struct PathSet {
  std::vector<std::vector<Path>> users;

  int num_users() const { return static_cast<int>(users.size()); }
  const std::vector<Path>& user(int k) const { return users.at(static_cast<std::size_t>(k)); }
};

/// Per-subcarrier channel matrices (N-bar x N) of one user.
struct WidebandChannel {
  std::vector<CMatrix> subcarriers;

  int num_subcarriers() const { return static_cast<int>(subcarriers.size()); }
  const CMatrix& operator[](int m) const { return subcarriers.at(static_cast<std::size_t>(m)); }
};

struct PathSampling {
  GridMode grid_mode = GridMode::on_grid;
  /// Minimum index distance between the DOAs (and between the DODs) of one
  /// user's paths when drawn on-grid.
  int min_separation_cells = 1;
  double max_delay_s = 20e-9;
};

/// Draws K users x L paths: directions uniform on [-1, 1] (snapped to the
/// Q-point grid on-grid), gains CN(0, 1), delays uniform on [0, max_delay_s].
PathSet sample_paths(const SystemConfig& cfg, std::uint64_t seed, const PathSampling& opts = {});
PathSet sample_paths(const SystemConfig& cfg, std::uint64_t seed, GridMode mode);

/// sqrt(N-bar * N / L).
double channel_scale(const SystemConfig& cfg);

cplx path_gain_at_subcarrier(const PathSet& paths, int k, int l, const SystemConfig& cfg, int m);

CMatrix channel_matrix(const PathSet& paths, int k, const SystemConfig& cfg, int m);
CMatrix channel_matrix(const std::vector<Path>& paths, const SystemConfig& cfg, int m);

WidebandChannel synthesize_channel(const PathSet& paths, int k, const SystemConfig& cfg);

/// i.i.d. CN(0, noise_variance) entries.
CMatrix awgn(Index rows, Index cols, double noise_variance, Rng& rng);
CMatrix awgn(Index rows, Index cols, double noise_variance, std::uint64_t seed);

}  // namespace bsaomp
