#include "bsaomp/sounding.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bsaomp/linalg.hpp"
#include "bsaomp/rng.hpp"

namespace bsaomp {

namespace {

CMatrix random_phase_matrix(Index rows, Index cols, Rng& rng) {
  std::uniform_real_distribution<double> phase(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
  const double mag = 1.0 / std::sqrt(static_cast<double>(rows));
  CMatrix X(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      X(i, j) = std::polar(mag, phase(rng));
    }
  }
  return X;
}

RVector inverse_column_norms(const CMatrix& X) {
  RVector out(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const double n = X.col(j).norm();
    out(j) = n > 0.0 ? 1.0 / n : 0.0;
  }
  return out;
}

}  // namespace

PilotPlan random_pilot_plan(Index bs_antennas, Index tx_pilots, Index ue_antennas, Index rx_pilots,
                            std::uint64_t seed) {
  if (bs_antennas < 1 || tx_pilots < 1 || ue_antennas < 1 || rx_pilots < 1) {
    throw std::invalid_argument("pilot plan dimensions must be >= 1");
  }
  Rng tx_rng = make_rng(seed, {0x7478});
  Rng rx_rng = make_rng(seed, {0x7278});
  return {random_phase_matrix(bs_antennas, tx_pilots, tx_rng),
          random_phase_matrix(ue_antennas, rx_pilots, rx_rng)};
}

PilotPlan random_pilot_plan(const SystemConfig& cfg, std::uint64_t seed) {
  return random_pilot_plan(cfg.bs_antennas, cfg.tx_pilots, cfg.ue_antennas, cfg.rx_pilots, seed);
}

KroneckerOperator::KroneckerOperator(const PilotPlan& plan) : plan_(plan) {}

CVector KroneckerOperator::apply(const CMatrix& H) const {
  if (H.rows() != plan_.rx_train.rows() || H.cols() != plan_.tx_train.rows()) {
    throw std::invalid_argument("sensing operator: channel shape mismatch");
  }
  return linalg::vec(plan_.rx_train.adjoint() * H * plan_.tx_train);
}

CVector KroneckerOperator::apply_vec(const CVector& h) const {
  return apply(linalg::unvec(h, plan_.rx_train.rows(), plan_.tx_train.rows()));
}

CVector KroneckerOperator::apply_adjoint(const CVector& y) const {
  const CMatrix Y = linalg::unvec(y, plan_.rx_pilots(), plan_.tx_pilots());
  return linalg::vec(plan_.rx_train * Y * plan_.tx_train.adjoint());
}

CMatrix KroneckerOperator::dense() const {
  constexpr Index kMaxEntries = Index{1} << 24;
  if (rows() * cols() > kMaxEntries) {
    throw std::length_error("refusing to materialize a sensing operator above 2^24 entries");
  }
  return linalg::kron(CMatrix(plan_.tx_train.transpose()), CMatrix(plan_.rx_train.adjoint()));
}

double noise_variance_from_snr_db(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) {
    return 0.0;
  }
  return std::pow(10.0, -snr_db / 10.0);
}

MeasurementBundle measure(const WidebandChannel& H, const PilotPlan& plan, double snr_db,
                          std::uint64_t seed) {
  MeasurementBundle out;
  out.snr_db = snr_db;
  out.noise_variance = noise_variance_from_snr_db(snr_db);
  out.y.reserve(H.subcarriers.size());
  const Index ue = plan.rx_train.rows();
  const Index P = plan.tx_pilots();
  for (int m = 0; m < H.num_subcarriers(); ++m) {
    if (H[m].rows() != ue || H[m].cols() != plan.tx_train.rows()) {
      throw std::invalid_argument("measure: channel shape does not match the pilot plan");
    }
    CMatrix Y = plan.rx_train.adjoint() * H[m] * plan.tx_train;
    if (out.noise_variance > 0.0) {
      Rng rng = make_rng(seed, {static_cast<std::uint64_t>(m)});
      const CMatrix E = awgn(ue, P, out.noise_variance, rng);
      Y.noalias() += plan.rx_train.adjoint() * E;
    }
    out.y.push_back(linalg::vec(Y));
  }
  return out;
}

SensingKernel::SensingKernel(const PilotPlan& plan, const BsaDictionary& dict)
    : plan_(plan), dict_(dict) {
  const auto& cfg = dict.config();
  if (plan.tx_train.rows() != cfg.bs_antennas || plan.rx_train.rows() != cfg.ue_antennas) {
    throw std::invalid_argument("pilot plan does not match dictionary array sizes");
  }
  rx_proj_.reserve(static_cast<std::size_t>(cfg.num_subcarriers));
  tx_proj_.reserve(static_cast<std::size_t>(cfg.num_subcarriers));
  for (int m = 0; m < cfg.num_subcarriers; ++m) {
    const DictionarySlice s = dict.slice(m);
    rx_proj_.push_back(plan.rx_train.adjoint() * s.rx_atoms);
    tx_proj_.push_back(plan.tx_train.adjoint() * s.tx_atoms);
    rx_inv_norm_.push_back(inverse_column_norms(rx_proj_.back()));
    tx_inv_norm_.push_back(inverse_column_norms(tx_proj_.back()));
  }
}

CVector SensingKernel::column(int m, int rx_q, int tx_q) const {
  const CVector tx = tx_projection(m).col(tx_q).conjugate();
  const CVector rx = rx_projection(m).col(rx_q);
  return linalg::kron(tx, rx);
}

CMatrix SensingKernel::correlate_complex(const CVector& residual, int m) const {
  if (residual.size() != measurements()) {
    throw std::invalid_argument("residual length does not match P-bar * P");
  }
  const Eigen::Map<const CMatrix> R(residual.data(), plan_.rx_pilots(), plan_.tx_pilots());
  const CMatrix RB = R * tx_projection(m);
  return rx_projection(m).adjoint() * RB;
}

RMatrix SensingKernel::correlate(const CVector& residual, int m) const {
  return correlate_complex(residual, m).cwiseAbs2().cwiseSqrt();
}

RMatrix SensingKernel::correlate_normalized(const CVector& residual, int m) const {
  return rx_inverse_norms(m).asDiagonal() * correlate(residual, m) *
         tx_inverse_norms(m).asDiagonal();
}

CVector sensing_column(const PilotPlan& plan, const BsaDictionary& dict, int m, int rx_q, int tx_q) {
  const CVector tx = (plan.tx_train.transpose() * dict.tx_atom(m, tx_q).conjugate()).eval();
  const CVector rx = (plan.rx_train.adjoint() * dict.rx_atom(m, rx_q)).eval();
  return linalg::kron(tx, rx);
}

RMatrix correlate_all_atoms(const CVector& residual, const PilotPlan& plan,
                            const BsaDictionary& dict, int m) {
  if (residual.size() != plan.measurements()) {
    throw std::invalid_argument("residual length does not match P-bar * P");
  }
  const DictionarySlice s = dict.slice(m);
  const CMatrix A = plan.rx_train.adjoint() * s.rx_atoms;
  const CMatrix B = plan.tx_train.adjoint() * s.tx_atoms;
  const Eigen::Map<const CMatrix> R(residual.data(), plan.rx_pilots(), plan.tx_pilots());
  return (A.adjoint() * (R * B)).cwiseAbs2().cwiseSqrt();
}

}  // namespace bsaomp
