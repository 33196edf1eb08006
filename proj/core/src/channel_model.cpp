#include "bsaomp/channel_model.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

namespace bsaomp {

namespace {

// Draws `count` grid indices with pairwise distance >= min_sep.
std::vector<int> draw_separated_indices(Rng& rng, int grid_size, int count, int min_sep) {
  std::uniform_int_distribution<int> pick(0, grid_size - 1);
  constexpr int kMaxAttempts = 100000;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(count));
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > kMaxAttempts) {
      throw std::invalid_argument("cannot place paths with the requested grid separation");
    }
    const int q = pick(rng);
    bool ok = true;
    for (int prev : out) {
      if (std::abs(prev - q) < std::max(min_sep, 1)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      out.push_back(q);
    }
  }
  return out;
}

}  // namespace

PathSet sample_paths(const SystemConfig& cfg, std::uint64_t seed, GridMode mode) {
  PathSampling opts;
  opts.grid_mode = mode;
  return sample_paths(cfg, seed, opts);
}

PathSet sample_paths(const SystemConfig& cfg, std::uint64_t seed, const PathSampling& opts) {
  cfg.validate();
  const PhysicalGrid grid(cfg.grid_size);
  PathSet set;
  set.users.resize(static_cast<std::size_t>(cfg.num_users));
  for (int k = 0; k < cfg.num_users; ++k) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(k)});
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> delay(0.0, opts.max_delay_s);

    std::vector<int> doa_idx, dod_idx;
    if (opts.grid_mode == GridMode::on_grid) {
      doa_idx = draw_separated_indices(rng, grid.size(), cfg.num_paths, opts.min_separation_cells);
      dod_idx = draw_separated_indices(rng, grid.size(), cfg.num_paths, opts.min_separation_cells);
    }
    auto& paths = set.users[static_cast<std::size_t>(k)];
    paths.reserve(static_cast<std::size_t>(cfg.num_paths));
    for (int l = 0; l < cfg.num_paths; ++l) {
      Path p;
      if (opts.grid_mode == GridMode::on_grid) {
        p.doa_index = doa_idx[static_cast<std::size_t>(l)];
        p.dod_index = dod_idx[static_cast<std::size_t>(l)];
        p.doa = PhysicalDirection(grid[p.doa_index]);
        p.dod = PhysicalDirection(grid[p.dod_index]);
      } else {
        p.doa = PhysicalDirection(unit(rng));
        p.dod = PhysicalDirection(unit(rng));
      }
      p.gain = complex_normal(rng, 1.0);
      p.delay_s = delay(rng);
      paths.push_back(p);
    }
  }
  return set;
}

double channel_scale(const SystemConfig& cfg) {
  return std::sqrt(static_cast<double>(cfg.ue_antennas) * cfg.bs_antennas / cfg.num_paths);
}

namespace {

cplx delayed_gain(const Path& p, const SystemConfig& cfg, int m) {
  const double fm = subcarrier_frequency(cfg, m);
  // Reduce the cycle count before forming the phase to keep it accurate.
  const double cycles = p.delay_s * fm;
  const double frac = cycles - std::floor(cycles);
  return channel_scale(cfg) * p.gain * std::polar(1.0, -2.0 * std::numbers::pi * frac);
}

}  // namespace

cplx path_gain_at_subcarrier(const PathSet& paths, int k, int l, const SystemConfig& cfg, int m) {
  return delayed_gain(paths.user(k).at(static_cast<std::size_t>(l)), cfg, m);
}

CMatrix channel_matrix(const std::vector<Path>& paths, const SystemConfig& cfg, int m) {
  const double eta = relative_frequency(cfg, m);
  CMatrix H = CMatrix::Zero(cfg.ue_antennas, cfg.bs_antennas);
  for (const auto& p : paths) {
    const CVector rx = steering_vector(eta * p.doa.value(), cfg.ue_antennas);
    const CVector tx = steering_vector(eta * p.dod.value(), cfg.bs_antennas);
    H.noalias() += delayed_gain(p, cfg, m) * rx * tx.adjoint();
  }
  return H;
}

CMatrix channel_matrix(const PathSet& paths, int k, const SystemConfig& cfg, int m) {
  return channel_matrix(paths.user(k), cfg, m);
}

WidebandChannel synthesize_channel(const PathSet& paths, int k, const SystemConfig& cfg) {
  WidebandChannel ch;
  ch.subcarriers.reserve(static_cast<std::size_t>(cfg.num_subcarriers));
  for (int m = 0; m < cfg.num_subcarriers; ++m) {
    ch.subcarriers.push_back(channel_matrix(paths, k, cfg, m));
  }
  return ch;
}

CMatrix awgn(Index rows, Index cols, double noise_variance, Rng& rng) {
  if (!(noise_variance >= 0.0)) {
    throw std::invalid_argument("noise variance must be non-negative");
  }
  CMatrix E(rows, cols);
  if (noise_variance == 0.0) {
    E.setZero();
    return E;
  }
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      E(i, j) = complex_normal(rng, noise_variance);
    }
  }
  return E;
}

CMatrix awgn(Index rows, Index cols, double noise_variance, std::uint64_t seed) {
  Rng rng(seed);
  return awgn(rows, cols, noise_variance, rng);
}

}  // namespace bsaomp
