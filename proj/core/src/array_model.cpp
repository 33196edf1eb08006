#include "bsaomp/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bsaomp {

namespace {

void require_positive(int value, const char* name) {
  if (value < 1) {
    throw std::invalid_argument(std::string(name) + " must be >= 1, got " + std::to_string(value));
  }
}

void check_subcarrier(const SystemConfig& cfg, int m) {
  if (m < 0 || m >= cfg.num_subcarriers) {
    throw std::out_of_range("subcarrier index " + std::to_string(m) + " outside [0, " +
                            std::to_string(cfg.num_subcarriers) + ")");
  }
}

}  // namespace

void SystemConfig::validate() const {
  require_positive(num_subcarriers, "num_subcarriers");
  require_positive(bs_antennas, "bs_antennas");
  require_positive(ue_antennas, "ue_antennas");
  require_positive(num_users, "num_users");
  require_positive(num_paths, "num_paths");
  require_positive(num_rf_chains, "num_rf_chains");
  require_positive(grid_size, "grid_size");
  require_positive(tx_pilots, "tx_pilots");
  require_positive(rx_pilots, "rx_pilots");
  if (!(carrier_hz > 0.0)) {
    throw std::invalid_argument("carrier_hz must be positive");
  }
  if (!(bandwidth_hz >= 0.0) || !(bandwidth_hz < 2.0 * carrier_hz)) {
    throw std::invalid_argument("bandwidth_hz must lie in [0, 2*carrier_hz)");
  }
  if (num_rf_chains != num_users) {
    throw std::invalid_argument("num_rf_chains must equal num_users");
  }
  if (grid_size < std::max(bs_antennas, ue_antennas)) {
    throw std::invalid_argument("grid_size must be >= max(bs_antennas, ue_antennas)");
  }
}

PhysicalDirection::PhysicalDirection(double value) : value_(value) {
  if (!std::isfinite(value) || std::abs(value) > 1.0 + 1e-12) {
    throw std::invalid_argument("physical direction must be a sine in [-1, 1], got " +
                                std::to_string(value));
  }
  value_ = std::clamp(value, -1.0, 1.0);
}

double PhysicalDirection::degrees() const { return sine_to_degrees(value_); }

double subcarrier_frequency(const SystemConfig& cfg, int m) {
  check_subcarrier(cfg, m);
  const double spacing = cfg.bandwidth_hz / cfg.num_subcarriers;
  const double offset = static_cast<double>(m) - 0.5 * (cfg.num_subcarriers - 1);
  return cfg.carrier_hz + spacing * offset;
}

double relative_frequency(const SystemConfig& cfg, int m) {
  return subcarrier_frequency(cfg, m) / cfg.carrier_hz;
}

SpatialDirection spatial_direction(PhysicalDirection phi, const SystemConfig& cfg, int m) {
  return {relative_frequency(cfg, m) * phi.value(), m};
}

double beam_split(PhysicalDirection phi, const SystemConfig& cfg, int m) {
  return spatial_direction(phi, cfg, m).value - phi.value();
}

CVector steering_vector(double direction, Index size) {
  if (size < 1) {
    throw std::invalid_argument("steering vector size must be >= 1");
  }
  CVector a(size);
  a(0) = cplx(1.0, 0.0);
  for (Index n = 1; n < size; ++n) {
    a(n) = std::polar(1.0, -std::numbers::pi * static_cast<double>(n) * direction);
  }
  return a;
}

GammaTransform gamma_transform_for_split(double split, Index size) {
  return {steering_vector(split, size), split};
}

GammaTransform gamma_transform(PhysicalDirection phi, const SystemConfig& cfg, int m, Index size) {
  return gamma_transform_for_split(beam_split(phi, cfg, m), size);
}

std::vector<double> phase_unwrap(std::span<const double> angles) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(angles.begin(), angles.end());
  double correction = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double step = angles[i] - angles[i - 1];
    // Snap the raw step into (-pi, pi] and carry the accumulated offset.
    const double wrapped = step - two_pi * std::floor((step + std::numbers::pi) / two_pi);
    double adjusted = wrapped;
    if (adjusted == -std::numbers::pi && step > 0.0) {
      adjusted = std::numbers::pi;
    }
    correction += adjusted - step;
    out[i] = angles[i] + correction;
  }
  return out;
}

double estimate_beam_split(const CVector& gamma) {
  const Index size = gamma.size();
  if (size < 2) {
    throw std::invalid_argument("beam-split estimation needs at least two gamma elements");
  }
  std::vector<double> phases(static_cast<std::size_t>(size));
  for (Index n = 0; n < size; ++n) {
    phases[static_cast<std::size_t>(n)] = std::arg(gamma(n));
  }
  const auto unwrapped = phase_unwrap(phases);
  // gamma_n = exp(-j*pi*n*split): the slope carries a minus sign.
  double acc = 0.0;
  for (Index n = 1; n < size; ++n) {
    acc += unwrapped[static_cast<std::size_t>(n)] / (std::numbers::pi * static_cast<double>(n));
  }
  return -acc / static_cast<double>(size - 1);
}

double sine_to_degrees(double sine) {
  return std::asin(std::clamp(sine, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

}  // namespace bsaomp
