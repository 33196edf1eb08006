#include "bsaomp/beamforming.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bsaomp/linalg.hpp"

namespace bsaomp {

LinearBeamformers HybridBeamformers::as_linear() const {
  LinearBeamformers out;
  out.precoders.reserve(baseband.size());
  out.combiners.reserve(baseband.size());
  for (const auto& bb : baseband) {
    out.precoders.push_back(analog_precoder * bb);
    out.combiners.push_back(analog_combiners);
  }
  return out;
}

CVector unconstrained_precoder(const CMatrix& H) {
  return linalg::dominant_right_singular_vector(H);
}

CVector unconstrained_combiner(const CMatrix& H, const CVector& f, double stream_power,
                               double noise_variance) {
  if (stream_power < 0.0 || noise_variance < 0.0) {
    throw std::invalid_argument("combiner: power and noise variance must be non-negative");
  }
  const CVector Hf = H * f;
  const double denom = stream_power * Hf.squaredNorm() + noise_variance;
  if (!(denom > 0.0)) {
    throw std::invalid_argument("combiner: singular receive covariance");
  }
  return Hf / denom;
}

namespace {

void check_channels(const std::vector<WidebandChannel>& channels) {
  if (channels.empty() || channels.front().num_subcarriers() == 0) {
    throw std::invalid_argument("need at least one user and one subcarrier");
  }
  const int M = channels.front().num_subcarriers();
  for (const auto& ch : channels) {
    if (ch.num_subcarriers() != M) {
      throw std::invalid_argument("users disagree on the number of subcarriers");
    }
  }
}

}  // namespace

HybridBeamformers design_hybrid(const std::vector<WidebandChannel>& channels,
                                const BsaDictionary& dict, double rho, double noise_variance) {
  check_channels(channels);
  const auto& cfg = dict.config();
  const int K = static_cast<int>(channels.size());
  const int M = channels.front().num_subcarriers();
  const int Q = dict.grid_size();
  if (K != cfg.num_rf_chains) {
    throw std::invalid_argument("hybrid design needs one RF chain per user");
  }
  if (M != cfg.num_subcarriers) {
    throw std::invalid_argument("channel subcarrier count does not match the dictionary");
  }
  const double stream_power = rho / K;

  // tx_mag[k](q, m) = |c_m,q^H f_k[m]|, rx_mag[k](qr, m) = |c-bar_m,qr^H w_k[m]|.
  std::vector<RMatrix> tx_mag(static_cast<std::size_t>(K), RMatrix(Q, M));
  std::vector<RMatrix> rx_mag(static_cast<std::size_t>(K), RMatrix(Q, M));
  for (int m = 0; m < M; ++m) {
    const DictionarySlice s = dict.slice(m);
    for (int k = 0; k < K; ++k) {
      const CMatrix& H = channels[static_cast<std::size_t>(k)][m];
      const CVector f = unconstrained_precoder(H);
      const CVector w = unconstrained_combiner(H, f, stream_power, noise_variance);
      tx_mag[static_cast<std::size_t>(k)].col(m) = (s.tx_atoms.adjoint() * f).cwiseAbs();
      rx_mag[static_cast<std::size_t>(k)].col(m) = (s.rx_atoms.adjoint() * w).cwiseAbs();
    }
  }

  HybridBeamformers bf;
  bf.analog_precoder.resize(cfg.bs_antennas, K);
  bf.analog_combiners.resize(cfg.ue_antennas, K);
  const double tx_norm = 1.0 / std::sqrt(static_cast<double>(cfg.bs_antennas));
  const double rx_norm = 1.0 / std::sqrt(static_cast<double>(cfg.ue_antennas));
  const auto& grid = dict.grid();
  for (int k = 0; k < K; ++k) {
    // |u^H v| factors into |c_q^H f| * |c-bar_qr^H w|; sum over m is a Q x Q product.
    const RMatrix score =
        tx_mag[static_cast<std::size_t>(k)] * rx_mag[static_cast<std::size_t>(k)].transpose();
    int best_tx = 0, best_rx = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int qt = 0; qt < Q; ++qt) {
      for (int qr = 0; qr < Q; ++qr) {
        if (score(qt, qr) > best) {
          best = score(qt, qr);
          best_tx = qt;
          best_rx = qr;
        }
      }
    }
    bf.tx_atoms.push_back(best_tx);
    bf.rx_atoms.push_back(best_rx);
    bf.analog_precoder.col(k) = tx_norm * steering_vector(grid[best_tx], cfg.bs_antennas);
    bf.analog_combiners.col(k) = rx_norm * steering_vector(grid[best_rx], cfg.ue_antennas);
  }

  bf.baseband.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    CMatrix Heff(K, K);
    for (int k = 0; k < K; ++k) {
      Heff.row(k) = bf.analog_combiners.col(k).adjoint() * channels[static_cast<std::size_t>(k)][m] *
                    bf.analog_precoder;
    }
    bool deficient = false;
    CMatrix Fbb = linalg::pinv(Heff, linalg::kPinvCutoff, &deficient);
    bf.pinv_flagged = bf.pinv_flagged || deficient;
    const double norm = (bf.analog_precoder * Fbb).norm();
    if (norm > 0.0) {
      Fbb /= norm;
    }
    bf.baseband.push_back(std::move(Fbb));
  }
  return bf;
}

LinearBeamformers fully_digital(const std::vector<WidebandChannel>& channels, double rho,
                                double noise_variance) {
  check_channels(channels);
  const int K = static_cast<int>(channels.size());
  const int M = channels.front().num_subcarriers();
  const double stream_power = rho / K;
  LinearBeamformers out;
  for (int m = 0; m < M; ++m) {
    const Index N = channels.front()[m].cols();
    const Index Nr = channels.front()[m].rows();
    CMatrix combiners(Nr, K);
    CMatrix G(K, N);
    for (int k = 0; k < K; ++k) {
      const CMatrix& H = channels[static_cast<std::size_t>(k)][m];
      const CVector f = unconstrained_precoder(H);
      CVector w = unconstrained_combiner(H, f, stream_power, noise_variance);
      if (w.norm() > 0.0) {
        w.normalize();
      }
      combiners.col(k) = w;
      G.row(k) = w.adjoint() * H;
    }
    CMatrix F = linalg::pinv(G);
    const double norm = F.norm();
    if (norm > 0.0) {
      F /= norm;
    }
    out.precoders.push_back(std::move(F));
    out.combiners.push_back(std::move(combiners));
  }
  return out;
}

double sum_rate(const std::vector<WidebandChannel>& channels, const LinearBeamformers& bf,
                double rho, double noise_variance) {
  check_channels(channels);
  const int K = static_cast<int>(channels.size());
  const int M = channels.front().num_subcarriers();
  if (static_cast<int>(bf.precoders.size()) != M || static_cast<int>(bf.combiners.size()) != M) {
    throw std::invalid_argument("beamformers do not cover every subcarrier");
  }
  if (rho < 0.0 || noise_variance < 0.0) {
    throw std::invalid_argument("sum_rate: power and noise variance must be non-negative");
  }
  const double p = rho / K;
  double total = 0.0;
  for (int m = 0; m < M; ++m) {
    const CMatrix& F = bf.precoders[static_cast<std::size_t>(m)];
    const CMatrix& Wc = bf.combiners[static_cast<std::size_t>(m)];
    for (int k = 0; k < K; ++k) {
      const CVector w = Wc.col(k);
      const Eigen::RowVectorXcd g = w.adjoint() * channels[static_cast<std::size_t>(k)][m] * F;
      const double signal = p * std::norm(g(k));
      double interference = 0.0;
      for (int j = 0; j < K; ++j) {
        if (j != k) {
          interference += p * std::norm(g(j));
        }
      }
      const double denom = interference + noise_variance * w.squaredNorm();
      if (signal <= 0.0) {
        continue;
      }
      const double sinr = denom > 0.0 ? signal / denom : std::numeric_limits<double>::infinity();
      total += std::log2(1.0 + sinr);
    }
  }
  return total / M;
}

double sum_rate(const std::vector<WidebandChannel>& channels, const HybridBeamformers& bf,
                double rho, double noise_variance) {
  return sum_rate(channels, bf.as_linear(), rho, noise_variance);
}

RVector array_gain_spectrum(const CVector& beam, const SystemConfig& cfg, int m,
                            const RVector& probe, ProbeKind kind) {
  const double scale = kind == ProbeKind::beam_split_aware ? relative_frequency(cfg, m) : 1.0;
  const Index N = beam.size();
  RVector gain(probe.size());
  for (Index i = 0; i < probe.size(); ++i) {
    const CVector a = steering_vector(scale * probe(i), N);
    gain(i) = std::norm(a.dot(beam)) / static_cast<double>(N);
  }
  return gain;
}

}  // namespace bsaomp
