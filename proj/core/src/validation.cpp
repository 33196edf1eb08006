#include "bsaomp/validation.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "bsaomp/array_model.hpp"
#include "bsaomp/beamforming.hpp"
#include "bsaomp/channel_model.hpp"
#include "bsaomp/dictionary.hpp"
#include "bsaomp/estimators.hpp"
#include "bsaomp/linalg.hpp"
#include "bsaomp/rng.hpp"
#include "bsaomp/sounding.hpp"

namespace bsaomp {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

SystemConfig small_config() {
  SystemConfig cfg;
  cfg.num_subcarriers = 4;
  cfg.bs_antennas = 8;
  cfg.ue_antennas = 4;
  cfg.num_users = 2;
  cfg.num_rf_chains = 2;
  cfg.num_paths = 2;
  cfg.grid_size = 32;
  cfg.tx_pilots = 4;
  cfg.rx_pilots = 4;
  return cfg;
}

InvariantResult gamma_identity(std::uint64_t seed) {
  const SystemConfig cfg;
  Rng rng = make_rng(seed, {1});
  std::uniform_real_distribution<double> dir(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const PhysicalDirection phi(dir(rng));
    const int m = i % cfg.num_subcarriers;
    const Index n = 1 + i % 64;
    const CVector lhs = steering_vector(relative_frequency(cfg, m) * phi.value(), n);
    const CVector rhs =
        gamma_transform(phi, cfg, m, n).diagonal.cwiseProduct(steering_vector(phi.value(), n));
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return {"gamma transform identity", worst < 1e-12, "max deviation " + sci(worst)};
}

InvariantResult split_roundtrip(std::uint64_t seed) {
  Rng rng = make_rng(seed, {2});
  std::uniform_real_distribution<double> split(-0.9, 0.9);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double d = split(rng);
    const Index n = 2 + i % 128;
    worst = std::max(worst, std::abs(estimate_beam_split(gamma_transform_for_split(d, n).diagonal) - d));
  }
  return {"beam-split round trip", worst < 1e-9, "max error " + sci(worst)};
}

InvariantResult scan_matches_dense(std::uint64_t seed) {
  const SystemConfig cfg = small_config();
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  const PilotPlan plan = random_pilot_plan(cfg, seed);
  Rng rng = make_rng(seed, {3});
  double worst = 0.0;
  for (int m = 0; m < cfg.num_subcarriers; ++m) {
    CVector r(plan.measurements());
    for (Index i = 0; i < r.size(); ++i) {
      r(i) = complex_normal(rng);
    }
    const RMatrix fast = correlate_all_atoms(r, plan, dict, m);
    for (int qr = 0; qr < cfg.grid_size; ++qr) {
      for (int qt = 0; qt < cfg.grid_size; ++qt) {
        worst = std::max(worst,
                         std::abs(std::abs(sensing_column(plan, dict, m, qr, qt).dot(r)) - fast(qr, qt)));
      }
    }
  }
  return {"separable scan equals dense scan", worst < 1e-10, "max deviation " + sci(worst)};
}

InvariantResult kronecker_apply(std::uint64_t seed) {
  const SystemConfig cfg = small_config();
  const PilotPlan plan = random_pilot_plan(cfg, seed);
  const KroneckerOperator G(plan);
  const PathSet paths = sample_paths(cfg, seed);
  const CMatrix H = channel_matrix(paths, 0, cfg, 1);
  const double dev = (G.dense() * linalg::vec(H) - G.apply(H)).norm();
  return {"factored operator equals dense Kronecker", dev < 1e-10, "deviation " + sci(dev)};
}

InvariantResult noiseless_recovery(std::uint64_t seed) {
  const SystemConfig cfg = small_config();
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  PathSampling opts;
  opts.min_separation_cells = 8;
  const PathSet paths = sample_paths(cfg, seed, opts);
  const PilotPlan plan = random_pilot_plan(8, 8, 4, 4, seed);
  const WidebandChannel H = synthesize_channel(paths, 0, cfg);
  const MeasurementBundle y = measure(H, plan, std::numeric_limits<double>::infinity(), seed);
  const SparseEstimate est = bsa_omp(y, plan, dict, cfg.num_paths);
  const double db = to_db(nmse(H, est.channel_est));
  return {"noiseless on-grid recovery", db < -100.0, "NMSE " + std::to_string(db) + " dB"};
}

InvariantResult ls_exact(std::uint64_t seed) {
  const SystemConfig cfg = small_config();
  const PilotPlan plan = random_pilot_plan(cfg.bs_antennas, cfg.bs_antennas, cfg.ue_antennas, cfg.ue_antennas, seed);
  const KroneckerOperator G(plan);
  const WidebandChannel H = synthesize_channel(sample_paths(cfg, seed), 0, cfg);
  const auto y = measure(H, plan, std::numeric_limits<double>::infinity(), seed);
  const double err = nmse(H, ls_estimate(y, G));
  return {"least squares exact without noise", err < 1e-20, "NMSE " + sci(err)};
}

InvariantResult mmse_matches_dense(std::uint64_t seed) {
  const SystemConfig cfg = small_config();
  const PilotPlan plan = random_pilot_plan(cfg.bs_antennas, cfg.bs_antennas, cfg.ue_antennas, cfg.ue_antennas, seed);
  const KroneckerOperator G(plan);
  const ChannelCovariance cov = channel_covariance(cfg, 2, GridMode::off_grid);
  const CMatrix R = cov.dense();
  const CMatrix Gd = G.dense();
  Rng rng = make_rng(seed, {4});
  CVector y(G.rows());
  for (Index i = 0; i < y.size(); ++i) {
    y(i) = complex_normal(rng);
  }
  const double s2 = 0.1;
  const CMatrix noise_cov = linalg::kron(CMatrix(CMatrix::Identity(plan.tx_pilots(), plan.tx_pilots())),
                                         CMatrix(plan.rx_train.adjoint() * plan.rx_train));
  const CMatrix inno = Gd * R * Gd.adjoint() + s2 * noise_cov;
  const CVector dense = R * Gd.adjoint() * inno.ldlt().solve(y);
  const CVector fast = mmse_estimate(y, G, cov, s2);
  const double dev = (dense - fast).norm() / dense.norm();
  return {"structured MMSE equals dense formula", dev < 1e-8, "relative deviation " + sci(dev)};
}

InvariantResult rate_sanity(std::uint64_t seed) {
  const SystemConfig cfg = small_config();
  const PathSet paths = sample_paths(cfg, seed);
  std::vector<WidebandChannel> H;
  for (int k = 0; k < cfg.num_users; ++k) {
    H.push_back(synthesize_channel(paths, k, cfg));
  }
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  const double fd = sum_rate(H, fully_digital(H, 1.0, 0.1), 1.0, 0.1);
  const double hy = sum_rate(H, design_hybrid(H, dict, 1.0, 0.1), 1.0, 0.1);
  const bool ok = std::isfinite(fd) && std::isfinite(hy) && fd >= 0.0 && hy >= 0.0;
  return {"sum rates finite and non-negative", ok,
          "fully digital " + std::to_string(fd) + ", hybrid " + std::to_string(hy)};
}

}  // namespace

std::vector<InvariantResult> run_invariant_suite(std::uint64_t seed) {
  const std::vector<std::function<InvariantResult(std::uint64_t)>> checks{
      gamma_identity, split_roundtrip,  scan_matches_dense, kronecker_apply,
      noiseless_recovery, ls_exact, mmse_matches_dense, rate_sanity};
  std::vector<InvariantResult> out;
  for (const auto& check : checks) {
    try {
      out.push_back(check(seed));
    } catch (const std::exception& e) {
      out.push_back({"(exception)", false, e.what()});
    }
  }
  return out;
}

}  // namespace bsaomp
