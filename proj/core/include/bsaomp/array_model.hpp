#pragma once

#include <span>
#include <vector>

#include "bsaomp/types.hpp"

namespace bsaomp {

/// Dimensions and RF parameters shared by every stage of the simulation.
///
/// Subcarriers are addressed with zero-based indices `m` in [0, M) throughout
/// the library; the carrier sits halfway between subcarriers 0 and M-1.
struct SystemConfig {
  double carrier_hz = 300e9;
  double bandwidth_hz = 30e9;
  int num_subcarriers = 16;  // M
  int bs_antennas = 64;      // N
  int ue_antennas = 8;       // N-bar
  int num_users = 2;         // K
  int num_paths = 3;         // L
  int num_rf_chains = 2;     // N_RF
  int grid_size = 512;       // Q
  int tx_pilots = 16;        // P
  int rx_pilots = 16;        // P-bar

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

/// Sine of a physical arrival/departure angle; always in [-1, 1].
class PhysicalDirection {
 public:
  PhysicalDirection() = default;
  explicit PhysicalDirection(double value);

  double value() const { return value_; }
  double degrees() const;

  friend bool operator==(PhysicalDirection, PhysicalDirection) = default;

 private:
  double value_ = 0.0;
};

/// Direction implied by the array phase progression at one subcarrier.
struct SpatialDirection {
  double value = 0.0;
  int subcarrier = 0;
};

/// Diagonal of the per-subcarrier transform that maps a physical-direction
/// steering vector onto its beam-split counterpart.
struct GammaTransform {
  CVector diagonal;
  double beam_split = 0.0;
};

double subcarrier_frequency(const SystemConfig& cfg, int m);
double relative_frequency(const SystemConfig& cfg, int m);

SpatialDirection spatial_direction(PhysicalDirection phi, const SystemConfig& cfg, int m);

/// (eta_m - 1) * phi.
double beam_split(PhysicalDirection phi, const SystemConfig& cfg, int m);

/// ULA response with element n equal to exp(-j*pi*n*direction), n = 0..size-1.
/// Unnormalized: every element has unit modulus and the first is exactly 1.
CVector steering_vector(double direction, Index size);

GammaTransform gamma_transform(PhysicalDirection phi, const SystemConfig& cfg, int m, Index size);
GammaTransform gamma_transform_for_split(double split, Index size);

/// Removes 2*pi jumps so that consecutive samples differ by at most pi.
std::vector<double> phase_unwrap(std::span<const double> angles);

/// Recovers the beam-split that produced `gamma` (inverse of gamma_transform).
/// Averages the unwrapped per-element phase slopes; needs at least 2 elements.
double estimate_beam_split(const CVector& gamma);

double sine_to_degrees(double sine);

}  // namespace bsaomp
