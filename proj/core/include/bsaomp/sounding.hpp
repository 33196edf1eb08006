#pragma once

#include <cstdint>
#include <vector>

#include "bsaomp/channel_model.hpp"
#include "bsaomp/dictionary.hpp"
#include "bsaomp/types.hpp"

namespace bsaomp {

/// Training beamformers. Pilot symbols are the identity, so they are implicit.
struct PilotPlan {
  CMatrix tx_train;  // N x P, entries of modulus 1/sqrt(N)
  CMatrix rx_train;  // N-bar x P-bar, entries of modulus 1/sqrt(N-bar)

  Index tx_pilots() const { return tx_train.cols(); }
  Index rx_pilots() const { return rx_train.cols(); }
  Index measurements() const { return tx_pilots() * rx_pilots(); }
  /// Channel uses consumed by one sounding round.
  Index channel_uses() const { return measurements(); }
};

/// Random-phase pilots with phases uniform on [-pi/2, pi/2].
PilotPlan random_pilot_plan(const SystemConfig& cfg, std::uint64_t seed);
PilotPlan random_pilot_plan(Index bs_antennas, Index tx_pilots, Index ue_antennas, Index rx_pilots,
                            std::uint64_t seed);

/// G = F^T (x) W^H acting on column-major vec(H), kept in factored form.
class KroneckerOperator {
 public:
  explicit KroneckerOperator(const PilotPlan& plan);

  Index rows() const { return plan_.measurements(); }
  Index cols() const { return plan_.tx_train.rows() * plan_.rx_train.rows(); }
  const PilotPlan& plan() const { return plan_; }

  /// vec(W^H H F) without forming G.
  CVector apply(const CMatrix& H) const;
  CVector apply_vec(const CVector& h) const;
  /// G^H y, i.e. vec(W Y F^H).
  CVector apply_adjoint(const CVector& y) const;

  /// Dense G; refused above 2^24 entries.
  CMatrix dense() const;

 private:
  PilotPlan plan_;
};

/// Noisy pilot observations of one user over all subcarriers.
struct MeasurementBundle {
  std::vector<CVector> y;  // per subcarrier, length P-bar * P
  double snr_db = 0.0;
  double noise_variance = 0.0;

  int num_subcarriers() const { return static_cast<int>(y.size()); }
};

/// Noise variance for a given SNR with unit transmit power; +inf dB -> 0.
double noise_variance_from_snr_db(double snr_db);

/// y[m] = vec(W^H H[m] F) + vec(W^H E[m]), E[m] i.i.d. CN(0, sigma^2).
MeasurementBundle measure(const WidebandChannel& H, const PilotPlan& plan, double snr_db,
                          std::uint64_t seed);

/// Pilot-projected dictionary of every subcarrier, shared by all correlation
/// scans that use the same plan and dictionary.
///
/// For subcarrier m it stores A_m = W^H C-bar_m (P-bar x Q) and
/// B_m = F^H C_m (P x Q). The sensing column of atom pair (qr, qt) is
/// psi = conj(B_m[:, qt]) (x) A_m[:, qr], and the full Q x Q scan of a residual
/// R (P-bar x P, column-major de-vectorized) is A_m^H R B_m.
class SensingKernel {
 public:
  SensingKernel(const PilotPlan& plan, const BsaDictionary& dict);

  const BsaDictionary& dictionary() const { return dict_; }
  const PilotPlan& plan() const { return plan_; }
  int num_subcarriers() const { return static_cast<int>(rx_proj_.size()); }
  int grid_size() const { return dict_.grid_size(); }
  Index measurements() const { return plan_.measurements(); }

  const CMatrix& rx_projection(int m) const { return rx_proj_.at(static_cast<std::size_t>(m)); }
  const CMatrix& tx_projection(int m) const { return tx_proj_.at(static_cast<std::size_t>(m)); }

  CVector column(int m, int rx_q, int tx_q) const;
  /// Complex inner products psi^H r for every atom pair, rows = rx index.
  CMatrix correlate_complex(const CVector& residual, int m) const;
  RMatrix correlate(const CVector& residual, int m) const;
  /// |psi^H r| / ||psi|| for every atom pair. ||psi|| = ||A_m[:, qr]|| ||B_m[:, qt]||.
  RMatrix correlate_normalized(const CVector& residual, int m) const;
  /// Reciprocal column norms 1/||A_m[:, qr]|| and 1/||B_m[:, qt]|| (0 for null columns).
  const RVector& rx_inverse_norms(int m) const { return rx_inv_norm_.at(static_cast<std::size_t>(m)); }
  const RVector& tx_inverse_norms(int m) const { return tx_inv_norm_.at(static_cast<std::size_t>(m)); }

 private:
  PilotPlan plan_;
  BsaDictionary dict_;
  std::vector<CMatrix> rx_proj_;
  std::vector<CMatrix> tx_proj_;
  std::vector<RVector> rx_inv_norm_;
  std::vector<RVector> tx_inv_norm_;
};

CVector sensing_column(const PilotPlan& plan, const BsaDictionary& dict, int m, int rx_q, int tx_q);

/// |psi_{qr,qt}[m]^H r| for all Q x Q atom pairs via the separable form.
RMatrix correlate_all_atoms(const CVector& residual, const PilotPlan& plan,
                            const BsaDictionary& dict, int m);

}  // namespace bsaomp
