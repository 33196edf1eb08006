#pragma once

#include <vector>

#include "bsaomp/channel_model.hpp"
#include "bsaomp/sounding.hpp"
#include "bsaomp/types.hpp"

namespace bsaomp {

/// Output of a greedy sparse recovery for one user.
struct SparseEstimate {
  std::vector<int> rx_support;  // atom index per recovered path (DOA side)
  std::vector<int> tx_support;  // atom index per recovered path (DOD side)
  std::vector<PhysicalDirection> doa_est;
  std::vector<PhysicalDirection> dod_est;
  RMatrix beam_split_est;  // paths x subcarriers
  CMatrix gains;           // paths x subcarriers
  WidebandChannel channel_est;

  /// residual_norms[i][m] = ||r_i[m]|| after iteration i (index 0 is ||y[m]||).
  std::vector<std::vector<double>> residual_norms;
  std::vector<CVector> residual;  // final residual per subcarrier
  bool rank_deficient = false;

  int num_paths() const { return static_cast<int>(rx_support.size()); }
};

struct OmpOptions {
  enum class Stop { fixed_iterations, residual_threshold };

  int num_paths = 3;
  Stop stop = Stop::fixed_iterations;
  /// Used with Stop::residual_threshold: stop once sum ||r|| / sum ||y|| drops below.
  double residual_threshold = 1e-3;
};

/// Greedy atom-pair pursuit over the beam-split-aware dictionary.
///
/// Each iteration picks the pair maximizing sum_m |psi^H r[m]| / ||psi[m]|| (ties go to
/// the lowest (rx, tx) index, already-selected pairs are skipped), re-solves
/// the gains on the support by minimum-norm least squares for every
/// subcarrier and projects the measurements onto the orthogonal complement.
/// Angles come straight from the grid, so they are subcarrier-independent,
/// and the beam-split estimate is (eta_m - 1) * phi-hat.
SparseEstimate bsa_omp(const MeasurementBundle& bundle, const SensingKernel& kernel,
                       const OmpOptions& opts);
SparseEstimate bsa_omp(const MeasurementBundle& bundle, const PilotPlan& plan,
                       const BsaDictionary& dict, int num_paths);

/// The same pursuit over a frequency-flat dictionary (eta forced to 1).
/// Reports zero beam-split.
SparseEstimate vanilla_omp(const MeasurementBundle& bundle, const SensingKernel& flat_kernel,
                           const OmpOptions& opts);
SparseEstimate vanilla_omp(const MeasurementBundle& bundle, const PilotPlan& plan,
                           const BsaDictionary& flat_dict, int num_paths);

/// h = G^+ y. Requires P * P-bar >= N * N-bar.
CVector ls_estimate(const CVector& y, const KroneckerOperator& G);
WidebandChannel ls_estimate(const MeasurementBundle& bundle, const KroneckerOperator& G);

/// Least-squares gains against the true steering pairs (angles known).
WidebandChannel oracle_ls_estimate(const MeasurementBundle& bundle, const PilotPlan& plan,
                                   const std::vector<Path>& true_paths, const SystemConfig& cfg);

/// Channel covariance E[vec(H) vec(H)^H] = scale * (tx_factor (x) rx_factor),
/// with tx_factor = E[a* a^T] (N x N) and rx_factor = E[a-bar a-bar^H].
struct ChannelCovariance {
  CMatrix tx_factor;
  CMatrix rx_factor;
  double scale = 1.0;

  CMatrix dense() const;
};

/// Exact covariance of one subcarrier under the sample_paths model: CN(0,1)
/// gains make paths uncorrelated, so only the angle statistics matter
/// (uniform on [-1, 1], or uniform over the grid points when on-grid).
ChannelCovariance channel_covariance(const SystemConfig& cfg, int m, GridMode mode);

/// Linear MMSE estimator for one subcarrier. The innovation matrix
/// s (A (x) B) + sigma^2 (I (x) S) is block-diagonalized through the
/// eigenvectors of A, so only P-bar x P-bar systems are ever solved.
class MmseEstimator {
 public:
  MmseEstimator(const KroneckerOperator& G, ChannelCovariance cov);

  CVector estimate(const CVector& y, double noise_variance, bool* regularized = nullptr) const;

 private:
  PilotPlan plan_;
  ChannelCovariance cov_;
  CMatrix tx_eigvecs_;
  RVector tx_eigvals_;
  CMatrix rx_signal_;  // W^H K_rx W
  CMatrix rx_noise_;   // W^H W
};

CVector mmse_estimate(const CVector& y, const KroneckerOperator& G, const ChannelCovariance& cov,
                      double noise_variance, bool* regularized = nullptr);

/// ||H - H-hat||_F^2 / ||H||_F^2.
double nmse(const CMatrix& truth, const CMatrix& estimate);
/// Mean of the per-subcarrier ratios.
double nmse(const WidebandChannel& truth, const WidebandChannel& estimate);
double to_db(double linear);

}  // namespace bsaomp
