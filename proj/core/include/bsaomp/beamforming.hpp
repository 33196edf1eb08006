#pragma once

#include <vector>

#include "bsaomp/channel_model.hpp"
#include "bsaomp/dictionary.hpp"
#include "bsaomp/types.hpp"

namespace bsaomp {

/// Per-subcarrier precoder (N x K) and per-user combiners (N-bar x K).
struct LinearBeamformers {
  std::vector<CMatrix> precoders;
  std::vector<CMatrix> combiners;
};

struct HybridBeamformers {
  CMatrix analog_precoder;        // N x K, entries of modulus 1/sqrt(N)
  std::vector<CMatrix> baseband;  // per subcarrier, K x K
  CMatrix analog_combiners;       // N-bar x K, column k serves user k
  std::vector<int> tx_atoms;      // selected grid index per RF chain
  std::vector<int> rx_atoms;
  bool pinv_flagged = false;

  LinearBeamformers as_linear() const;
};

/// Dominant right singular vector of H (unit norm).
CVector unconstrained_precoder(const CMatrix& H);

/// Linear-MMSE receive vector for a single stream sent along f:
/// w = (p H f f^H H^H + sigma^2 I)^{-1} H f = H f / (p ||H f||^2 + sigma^2),
/// where p is the per-stream power rho/K.
CVector unconstrained_combiner(const CMatrix& H, const CVector& f, double stream_power,
                               double noise_variance);

/// Hybrid design from (estimated) channels: for each user pick the atom pair
/// maximizing sum_m |c_q^H f_opt[m]| |c-bar_qr^H w_opt[m]|, use the
/// physical-direction steering vectors of that pair as analog beams, then
/// zero-force the K x K effective channel per subcarrier and normalize so that
/// ||F_RF F_BB[m]||_F = 1.
HybridBeamformers design_hybrid(const std::vector<WidebandChannel>& channels,
                                const BsaDictionary& dict, double rho, double noise_variance);

/// Fully-digital benchmark: per-subcarrier unconstrained combiners and a
/// zero-forcing precoder over the whole array, ||F[m]||_F = 1.
LinearBeamformers fully_digital(const std::vector<WidebandChannel>& channels, double rho,
                                double noise_variance);

/// (1/M) sum_m sum_k log2(1 + SINR_k[m]) with per-stream power rho/K.
double sum_rate(const std::vector<WidebandChannel>& channels, const LinearBeamformers& bf,
                double rho, double noise_variance);
double sum_rate(const std::vector<WidebandChannel>& channels, const HybridBeamformers& bf,
                double rho, double noise_variance);

enum class ProbeKind { frequency_flat, beam_split_aware };

/// |a(s * theta)^H f|^2 / N over the probe directions, s = 1 for flat probes
/// and eta_m for beam-split-aware probes.
RVector array_gain_spectrum(const CVector& beam, const SystemConfig& cfg, int m,
                            const RVector& probe, ProbeKind kind);

}  // namespace bsaomp
