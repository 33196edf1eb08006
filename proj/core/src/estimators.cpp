#include "bsaomp/estimators.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "bsaomp/linalg.hpp"

namespace bsaomp {

namespace {

struct AtomPair {
  int rx = 0;
  int tx = 0;
};

SparseEstimate greedy_pursuit(const MeasurementBundle& bundle, const SensingKernel& kernel,
                              const OmpOptions& opts) {
  const int M = kernel.num_subcarriers();
  const int Q = kernel.grid_size();
  const Index rows = kernel.measurements();
  if (opts.num_paths < 1) {
    throw std::invalid_argument("number of paths must be >= 1");
  }
  if (static_cast<double>(opts.num_paths) >
      std::min(static_cast<double>(rows), static_cast<double>(Q) * Q)) {
    throw std::invalid_argument("number of paths exceeds min(P-bar * P, Q^2)");
  }
  if (bundle.num_subcarriers() != M) {
    throw std::invalid_argument("measurement bundle does not cover every subcarrier");
  }
  for (const auto& y : bundle.y) {
    if (y.size() != rows) {
      throw std::invalid_argument("measurement length does not match the pilot plan");
    }
  }

  const auto& dict = kernel.dictionary();
  const auto& grid = dict.grid();

  SparseEstimate est;
  std::vector<CVector> residual = bundle.y;
  std::vector<CMatrix> support_cols(static_cast<std::size_t>(M));
  std::vector<CVector> gains(static_cast<std::size_t>(M));
  std::vector<AtomPair> support;

  double y_norm_total = 0.0;
  {
    std::vector<double> norms(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
      norms[static_cast<std::size_t>(m)] = bundle.y[static_cast<std::size_t>(m)].norm();
      y_norm_total += norms[static_cast<std::size_t>(m)];
    }
    est.residual_norms.push_back(std::move(norms));
  }

  RMatrix score(Q, Q);
  for (int l = 0; l < opts.num_paths; ++l) {
    score.setZero();
    for (int m = 0; m < M; ++m) {
      score += kernel.correlate_normalized(residual[static_cast<std::size_t>(m)], m);
    }
    for (const auto& p : support) {
      score(p.rx, p.tx) = -1.0;
    }
    // Lexicographic scan keeps the lowest (rx, tx) pair on ties.
    AtomPair best{0, 0};
    double best_val = -std::numeric_limits<double>::infinity();
    for (int qr = 0; qr < Q; ++qr) {
      for (int qt = 0; qt < Q; ++qt) {
        if (score(qr, qt) > best_val) {
          best_val = score(qr, qt);
          best = {qr, qt};
        }
      }
    }
    support.push_back(best);

    std::vector<double> norms(static_cast<std::size_t>(M));
    double r_norm_total = 0.0;
    for (int m = 0; m < M; ++m) {
      auto& cols = support_cols[static_cast<std::size_t>(m)];
      cols.conservativeResize(rows, static_cast<Index>(support.size()));
      cols.col(static_cast<Index>(support.size()) - 1) = kernel.column(m, best.rx, best.tx);
      const auto& y = bundle.y[static_cast<std::size_t>(m)];
      auto ls = linalg::min_norm_solve(cols, y);
      est.rank_deficient = est.rank_deficient || ls.rank_deficient;
      gains[static_cast<std::size_t>(m)] = ls.solution.col(0);
      residual[static_cast<std::size_t>(m)] = y - cols * gains[static_cast<std::size_t>(m)];
      norms[static_cast<std::size_t>(m)] = residual[static_cast<std::size_t>(m)].norm();
      r_norm_total += norms[static_cast<std::size_t>(m)];
    }
    est.residual_norms.push_back(std::move(norms));

    if (opts.stop == OmpOptions::Stop::residual_threshold &&
        r_norm_total <= opts.residual_threshold * y_norm_total) {
      break;
    }
  }

  const int L = static_cast<int>(support.size());
  const auto& cfg = dict.config();
  est.beam_split_est.resize(L, M);
  est.gains.resize(L, M);
  for (const auto& p : support) {
    est.rx_support.push_back(p.rx);
    est.tx_support.push_back(p.tx);
    est.doa_est.push_back(physical_from_atom(p.rx, grid));
    est.dod_est.push_back(physical_from_atom(p.tx, grid));
  }
  est.channel_est.subcarriers.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    const double scale = dict.atom_scale(m);
    CMatrix H = CMatrix::Zero(cfg.ue_antennas, cfg.bs_antennas);
    for (int l = 0; l < L; ++l) {
      const double phi = est.doa_est[static_cast<std::size_t>(l)].value();
      est.beam_split_est(l, m) = scale * phi - phi;
      const cplx z = gains[static_cast<std::size_t>(m)](l);
      est.gains(l, m) = z;
      const auto& p = support[static_cast<std::size_t>(l)];
      H.noalias() += z * dict.rx_atom(m, p.rx) * dict.tx_atom(m, p.tx).adjoint();
    }
    est.channel_est.subcarriers.push_back(std::move(H));
  }
  est.residual = std::move(residual);
  return est;
}

}  // namespace

SparseEstimate bsa_omp(const MeasurementBundle& bundle, const SensingKernel& kernel,
                       const OmpOptions& opts) {
  if (kernel.dictionary().kind() != BsaDictionary::Kind::beam_split_aware) {
    throw std::invalid_argument("bsa_omp needs a beam-split-aware dictionary");
  }
  return greedy_pursuit(bundle, kernel, opts);
}

SparseEstimate bsa_omp(const MeasurementBundle& bundle, const PilotPlan& plan,
                       const BsaDictionary& dict, int num_paths) {
  OmpOptions opts;
  opts.num_paths = num_paths;
  return bsa_omp(bundle, SensingKernel(plan, dict), opts);
}

SparseEstimate vanilla_omp(const MeasurementBundle& bundle, const SensingKernel& flat_kernel,
                           const OmpOptions& opts) {
  if (flat_kernel.dictionary().kind() != BsaDictionary::Kind::frequency_flat) {
    throw std::invalid_argument("vanilla_omp needs a frequency-flat dictionary");
  }
  return greedy_pursuit(bundle, flat_kernel, opts);
}

SparseEstimate vanilla_omp(const MeasurementBundle& bundle, const PilotPlan& plan,
                           const BsaDictionary& flat_dict, int num_paths) {
  OmpOptions opts;
  opts.num_paths = num_paths;
  return vanilla_omp(bundle, SensingKernel(plan, flat_dict), opts);
}

namespace {

void require_full_observation(const KroneckerOperator& G) {
  if (G.rows() < G.cols()) {
    throw std::invalid_argument(
        "least squares needs at least N * N-bar = " + std::to_string(G.cols()) +
        " channel uses, the pilot plan provides P * P-bar = " + std::to_string(G.rows()));
  }
}

}  // namespace

CVector ls_estimate(const CVector& y, const KroneckerOperator& G) {
  require_full_observation(G);
  const auto& plan = G.plan();
  if (y.size() != G.rows()) {
    throw std::invalid_argument("ls_estimate: measurement length mismatch");
  }
  // (F^T (x) W^H)^+ = (F^T)^+ (x) (W^H)^+, so H = (W^H)^+ Y ((F^T)^+)^T.
  const CMatrix Y = linalg::unvec(y, plan.rx_pilots(), plan.tx_pilots());
  const CMatrix rx_pinv = linalg::pinv(plan.rx_train.adjoint());
  const CMatrix tx_pinv = linalg::pinv(plan.tx_train.transpose());
  return linalg::vec(rx_pinv * Y * tx_pinv.transpose());
}

WidebandChannel ls_estimate(const MeasurementBundle& bundle, const KroneckerOperator& G) {
  require_full_observation(G);
  const auto& plan = G.plan();
  const CMatrix rx_pinv = linalg::pinv(plan.rx_train.adjoint());
  const CMatrix tx_pinv_t = linalg::pinv(plan.tx_train.transpose()).transpose();
  WidebandChannel out;
  for (const auto& y : bundle.y) {
    if (y.size() != G.rows()) {
      throw std::invalid_argument("ls_estimate: measurement length mismatch");
    }
    const CMatrix Y = linalg::unvec(y, plan.rx_pilots(), plan.tx_pilots());
    out.subcarriers.push_back(rx_pinv * Y * tx_pinv_t);
  }
  return out;
}

WidebandChannel oracle_ls_estimate(const MeasurementBundle& bundle, const PilotPlan& plan,
                                   const std::vector<Path>& true_paths, const SystemConfig& cfg) {
  if (true_paths.empty()) {
    throw std::invalid_argument("oracle LS needs at least one path");
  }
  if (plan.tx_train.rows() != cfg.bs_antennas || plan.rx_train.rows() != cfg.ue_antennas) {
    throw std::invalid_argument("oracle LS: pilot plan does not match the configuration");
  }
  WidebandChannel out;
  const Index L = static_cast<Index>(true_paths.size());
  for (int m = 0; m < bundle.num_subcarriers(); ++m) {
    const auto& y = bundle.y[static_cast<std::size_t>(m)];
    if (y.size() != plan.measurements()) {
      throw std::invalid_argument("oracle LS: measurement length mismatch");
    }
    const double eta = relative_frequency(cfg, m);
    std::vector<CVector> rx_atoms, tx_atoms;
    CMatrix Psi(plan.measurements(), L);
    for (Index l = 0; l < L; ++l) {
      const auto& p = true_paths[static_cast<std::size_t>(l)];
      rx_atoms.push_back(steering_vector(eta * p.doa.value(), cfg.ue_antennas));
      tx_atoms.push_back(steering_vector(eta * p.dod.value(), cfg.bs_antennas));
      const CVector tx = plan.tx_train.transpose() * tx_atoms.back().conjugate();
      const CVector rx = plan.rx_train.adjoint() * rx_atoms.back();
      Psi.col(l) = linalg::kron(tx, rx);
    }
    const CVector z = linalg::min_norm_solve(Psi, y).solution.col(0);
    CMatrix H = CMatrix::Zero(cfg.ue_antennas, cfg.bs_antennas);
    for (Index l = 0; l < L; ++l) {
      H.noalias() += z(l) * rx_atoms[static_cast<std::size_t>(l)] *
                     tx_atoms[static_cast<std::size_t>(l)].adjoint();
    }
    out.subcarriers.push_back(std::move(H));
  }
  return out;
}

CMatrix ChannelCovariance::dense() const { return scale * linalg::kron(tx_factor, rx_factor); }

namespace {

// E[exp(-j*pi*d*eta*phi)] for phi uniform on [-1, 1] or over the grid.
CMatrix angle_correlation(Index size, double eta, GridMode mode, const PhysicalGrid& grid) {
  std::vector<double> lag(static_cast<std::size_t>(size));
  for (Index d = 0; d < size; ++d) {
    double v = 0.0;
    if (d == 0) {
      v = 1.0;
    } else if (mode == GridMode::off_grid) {
      const double x = std::numbers::pi * static_cast<double>(d) * eta;
      v = std::sin(x) / x;
    } else {
      for (double phi : grid.points()) {
        v += std::cos(std::numbers::pi * static_cast<double>(d) * eta * phi);
      }
      v /= grid.size();
    }
    lag[static_cast<std::size_t>(d)] = v;
  }
  CMatrix T(size, size);
  for (Index i = 0; i < size; ++i) {
    for (Index j = 0; j < size; ++j) {
      T(i, j) = lag[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  return T;
}

}  // namespace

ChannelCovariance channel_covariance(const SystemConfig& cfg, int m, GridMode mode) {
  const double eta = relative_frequency(cfg, m);
  const PhysicalGrid grid(cfg.grid_size);
  ChannelCovariance cov;
  // Real symmetric, so E[a* a^T] and E[a a^H] coincide.
  cov.tx_factor = angle_correlation(cfg.bs_antennas, eta, mode, grid);
  cov.rx_factor = angle_correlation(cfg.ue_antennas, eta, mode, grid);
  // zeta^2 * L * E|alpha|^2
  cov.scale = static_cast<double>(cfg.ue_antennas) * cfg.bs_antennas;
  return cov;
}

MmseEstimator::MmseEstimator(const KroneckerOperator& G, ChannelCovariance cov)
    : plan_(G.plan()), cov_(std::move(cov)) {
  const CMatrix& F = plan_.tx_train;
  const CMatrix& W = plan_.rx_train;
  if (cov_.tx_factor.rows() != F.rows() || cov_.rx_factor.rows() != W.rows()) {
    throw std::invalid_argument("covariance factors do not match the pilot plan");
  }
  const CMatrix A = F.transpose() * cov_.tx_factor * F.conjugate();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (A + A.adjoint()));
  tx_eigvecs_ = eig.eigenvectors();
  tx_eigvals_ = eig.eigenvalues().cwiseMax(0.0);
  rx_signal_ = W.adjoint() * cov_.rx_factor * W;
  rx_noise_ = W.adjoint() * W;
}

CVector MmseEstimator::estimate(const CVector& y, double noise_variance, bool* regularized) const {
  if (!(noise_variance >= 0.0)) {
    throw std::invalid_argument("noise variance must be non-negative");
  }
  const Index P = plan_.tx_pilots();
  const Index Pr = plan_.rx_pilots();
  if (y.size() != P * Pr) {
    throw std::invalid_argument("mmse_estimate: measurement length mismatch");
  }
  const CMatrix Y = linalg::unvec(y, Pr, P);
  const CMatrix Z = Y * tx_eigvecs_.conjugate();
  CMatrix X(Pr, P);
  bool flagged = false;
  for (Index i = 0; i < P; ++i) {
    const CMatrix block = cov_.scale * tx_eigvals_(i) * rx_signal_ + noise_variance * rx_noise_;
    Eigen::LDLT<CMatrix> ldlt(block);
    bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
    if (ok) {
      const auto d = ldlt.vectorD().cwiseAbs();
      ok = d.size() > 0 && d.minCoeff() > 1e-12 * std::max(d.maxCoeff(), 1e-300);
    }
    if (ok) {
      X.col(i) = ldlt.solve(Z.col(i));
    } else {
      auto ls = linalg::min_norm_solve(block, Z.col(i));
      X.col(i) = ls.solution.col(0);
      flagged = true;
    }
  }
  if (regularized != nullptr) {
    *regularized = flagged;
  }
  const CMatrix Xo = X * tx_eigvecs_.transpose();
  const CMatrix& F = plan_.tx_train;
  const CMatrix& W = plan_.rx_train;
  const CMatrix back = W * Xo * F.adjoint();
  return cov_.scale * linalg::vec(cov_.rx_factor * back * cov_.tx_factor.transpose());
}

CVector mmse_estimate(const CVector& y, const KroneckerOperator& G, const ChannelCovariance& cov,
                      double noise_variance, bool* regularized) {
  return MmseEstimator(G, cov).estimate(y, noise_variance, regularized);
}

double nmse(const CMatrix& truth, const CMatrix& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw std::invalid_argument("nmse: shape mismatch");
  }
  const double denom = truth.squaredNorm();
  if (!(denom > 0.0)) {
    throw std::invalid_argument("nmse: reference channel has zero energy");
  }
  return (truth - estimate).squaredNorm() / denom;
}

double nmse(const WidebandChannel& truth, const WidebandChannel& estimate) {
  if (truth.num_subcarriers() != estimate.num_subcarriers() || truth.num_subcarriers() == 0) {
    throw std::invalid_argument("nmse: subcarrier count mismatch");
  }
  double acc = 0.0;
  for (int m = 0; m < truth.num_subcarriers(); ++m) {
    acc += nmse(truth[m], estimate[m]);
  }
  return acc / truth.num_subcarriers();
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace bsaomp
