#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bsaomp/beamforming.hpp"
#include "bsaomp/estimators.hpp"
#include "bsaomp/experiment.hpp"
#include "bsaomp/linalg.hpp"
#include "bsaomp/rng.hpp"

using namespace bsaomp;
using Catch::Approx;

namespace {

SystemConfig wideband_small() {
  SystemConfig cfg;
  cfg.num_subcarriers = 8;
  cfg.bs_antennas = 16;
  cfg.ue_antennas = 4;
  cfg.num_users = 1;
  cfg.num_rf_chains = 1;
  cfg.num_paths = 2;
  cfg.grid_size = 32;
  cfg.tx_pilots = 8;
  cfg.rx_pilots = 4;
  return cfg;
}

CVector random_vector(Index n, Rng& rng) {
  CVector v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = complex_normal(rng);
  }
  return v;
}

}  // namespace

TEST_CASE("channel superposition") {
  const auto cfg = wideband_small();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PathSet paths = sample_paths(cfg, seed, GridMode::off_grid);
    for (int m = 0; m < cfg.num_subcarriers; ++m) {
      CMatrix sum = CMatrix::Zero(cfg.ue_antennas, cfg.bs_antennas);
      for (const auto& p : paths.user(0)) {
        sum += channel_matrix(std::vector<Path>{p}, cfg, m);
      }
      const CMatrix H = channel_matrix(paths, 0, cfg, m);
      CHECK((H - sum).norm() < 1e-12 * H.norm());
    }
  }
}

TEST_CASE("centre subcarrier is free of beam split") {
  auto cfg = wideband_small();
  cfg.num_subcarriers = 9;
  auto narrow = cfg;
  narrow.bandwidth_hz = 0.0;
  const int centre = (cfg.num_subcarriers - 1) / 2;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PathSampling opts;
    opts.grid_mode = GridMode::off_grid;
    opts.max_delay_s = 0.0;
    const PathSet paths = sample_paths(cfg, seed, opts);
    const CMatrix H = channel_matrix(paths, 0, cfg, centre);
    const CMatrix H0 = channel_matrix(paths, 0, narrow, centre);
    CHECK((H - H0).norm() == 0.0);
  }
}

TEST_CASE("Kronecker bridge and vec round trip") {
  Rng rng(1);
  std::uniform_int_distribution<int> dim(1, 9);
  for (int trial = 0; trial < 50; ++trial) {
    const Index N = dim(rng), Nr = dim(rng), P = dim(rng), Pr = dim(rng);
    const auto plan = random_pilot_plan(N, P, Nr, Pr, static_cast<std::uint64_t>(trial));
    const CVector a = random_vector(N, rng);
    const CVector ar = random_vector(Nr, rng);
    const CMatrix G = KroneckerOperator(plan).dense();
    const CVector lhs = G * linalg::kron(CVector(a.conjugate()), ar);
    const CVector rhs = linalg::kron(CVector(plan.tx_train.transpose() * a.conjugate()),
                                     CVector(plan.rx_train.adjoint() * ar));
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));

    CMatrix Y(Pr, P);
    for (Index j = 0; j < P; ++j) {
      Y.col(j) = random_vector(Pr, rng);
    }
    CHECK(linalg::unvec(linalg::vec(Y), Pr, P) == Y);
  }
}

TEST_CASE("separable scan equals the naive scan") {
  Rng rng(2);
  std::uniform_int_distribution<int> side(1, 8);
  std::uniform_int_distribution<int> grid(8, 32);
  int instances = 0;
  while (instances < 20) {
    SystemConfig cfg;
    cfg.num_subcarriers = 3;
    cfg.bs_antennas = side(rng);
    cfg.ue_antennas = side(rng);
    if (cfg.bs_antennas * cfg.ue_antennas > 64) {
      continue;
    }
    cfg.grid_size = grid(rng);
    cfg.num_users = cfg.num_rf_chains = 1;
    cfg.num_paths = 1;
    const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
    const auto plan = random_pilot_plan(cfg.bs_antennas, side(rng), cfg.ue_antennas, side(rng), rng());
    const CVector r = random_vector(plan.measurements(), rng);
    for (int m = 0; m < cfg.num_subcarriers; ++m) {
      const RMatrix fast = correlate_all_atoms(r, plan, dict, m);
      double worst = 0.0;
      for (int qr = 0; qr < cfg.grid_size; ++qr) {
        for (int qt = 0; qt < cfg.grid_size; ++qt) {
          const CVector psi = sensing_column(plan, dict, m, qr, qt);
          worst = std::max(worst, std::abs(fast(qr, qt) - std::abs(psi.dot(r))));
        }
      }
      CHECK(worst < 1e-10 * (1.0 + r.norm()));
    }
    ++instances;
  }
}

TEST_CASE("subcarrier accumulation is order independent") {
  const auto cfg = wideband_small();
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  const auto plan = random_pilot_plan(cfg, 3);
  const SensingKernel kernel(plan, dict);
  Rng rng(4);
  std::vector<CVector> r;
  for (int m = 0; m < cfg.num_subcarriers; ++m) {
    r.push_back(random_vector(plan.measurements(), rng));
  }
  RMatrix fwd = RMatrix::Zero(cfg.grid_size, cfg.grid_size);
  RMatrix rev = fwd;
  for (int m = 0; m < cfg.num_subcarriers; ++m) {
    fwd += kernel.correlate(r[m], m);
    rev += kernel.correlate(r[cfg.num_subcarriers - 1 - m], cfg.num_subcarriers - 1 - m);
  }
  CHECK(((fwd - rev).cwiseAbs().array() <= 1e-8 * fwd.cwiseAbs().array()).all());
}

TEST_CASE("pursuit output invariants") {
  const auto cfg = wideband_small();
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  const auto plan = random_pilot_plan(cfg, 9);
  const SensingKernel kernel(plan, dict);
  OmpOptions opts;
  opts.num_paths = 4;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto paths = sample_paths(cfg, seed, GridMode::off_grid);
    const auto H = synthesize_channel(paths, 0, cfg);
    const auto est = bsa_omp(measure(H, plan, 10.0, seed), kernel, opts);
    for (int m = 0; m < cfg.num_subcarriers; ++m) {
      CMatrix Psi(plan.measurements(), est.num_paths());
      for (int l = 0; l < est.num_paths(); ++l) {
        Psi.col(l) = kernel.column(m, est.rx_support[l], est.tx_support[l]);
      }
      const double ortho = (Psi.adjoint() * est.residual[m]).norm();
      CHECK(ortho <= 1e-8 * Psi.norm() * (est.residual_norms[0][m] + 1.0));

      const double eta = relative_frequency(cfg, m);
      for (int l = 0; l < est.num_paths(); ++l) {
        const double phi = est.doa_est[l].value();
        CHECK(phi == dict.grid()[est.rx_support[l]]);
        CHECK(std::abs(phi) <= 1.0);
        CHECK(std::abs(est.dod_est[l].value()) <= 1.0);
        CHECK((eta * phi) / eta == Approx(phi).epsilon(1e-15));
        CHECK(est.beam_split_est(l, m) == eta * phi - phi);
      }
    }
  }
}

TEST_CASE("pursuit dominance over the frequency-flat dictionary") {
  const auto cfg = wideband_small();
  const PhysicalGrid grid(cfg.grid_size);
  const BsaDictionary bsa(cfg, grid);
  const BsaDictionary flat(cfg, grid, BsaDictionary::Kind::frequency_flat);
  const int trials = 60;
  for (double snr : {-10.0, 0.0, 10.0, 20.0, 30.0}) {
    double aware = 0.0, plain = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto plan = random_pilot_plan(cfg, derive_seed(11, {2, std::uint64_t(t)}));
      const auto paths = sample_paths(cfg, derive_seed(11, {1, std::uint64_t(t)}), GridMode::on_grid);
      const auto H = synthesize_channel(paths, 0, cfg);
      const auto y = measure(H, plan, snr, derive_seed(11, {3, std::uint64_t(t)}));
      aware += nmse(H, bsa_omp(y, plan, bsa, cfg.num_paths).channel_est);
      plain += nmse(H, vanilla_omp(y, plan, flat, cfg.num_paths).channel_est);
    }
    INFO("snr " << snr << " dB: aware " << to_db(aware / trials) << " flat " << to_db(plain / trials));
    CHECK(aware <= plain);
    if (snr >= 10.0) {
      CHECK(aware < plain);
    }
  }
}

TEST_CASE("hybrid atom selection is scale invariant") {
  auto cfg = wideband_small();
  cfg.num_users = cfg.num_rf_chains = 2;
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto paths = sample_paths(cfg, seed, GridMode::off_grid);
    std::vector<WidebandChannel> H, scaled;
    const double c = 3.7;
    for (int k = 0; k < 2; ++k) {
      H.push_back(synthesize_channel(paths, k, cfg));
      scaled.push_back(H.back());
      for (auto& Hm : scaled.back().subcarriers) {
        Hm *= c;
      }
    }
    // Scaling H by c and sigma^2 by c^2 scales every w_opt by 1/c.
    const auto a = design_hybrid(H, dict, 1.0, 0.2);
    const auto b = design_hybrid(scaled, dict, 1.0, 0.2 * c * c);
    CHECK(a.tx_atoms == b.tx_atoms);
    CHECK(a.rx_atoms == b.rx_atoms);
  }
}

TEST_CASE("fully digital dominates hybrid on most trials") {
  auto cfg = wideband_small();
  cfg.num_users = cfg.num_rf_chains = 2;
  cfg.num_paths = 3;
  const BsaDictionary dict(cfg, PhysicalGrid(cfg.grid_size));
  const double s2 = noise_variance_from_snr_db(10.0);
  int wins = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    const auto paths = sample_paths(cfg, 500 + t, GridMode::off_grid);
    std::vector<WidebandChannel> H;
    for (int k = 0; k < 2; ++k) {
      H.push_back(synthesize_channel(paths, k, cfg));
    }
    const double fd = sum_rate(H, fully_digital(H, 1.0, s2), 1.0, s2);
    const double hy = sum_rate(H, design_hybrid(H, dict, 1.0, s2), 1.0, s2);
    wins += fd >= hy;
  }
  CHECK(wins >= 0.95 * trials);
}

TEST_CASE("overhead bookkeeping at the full-size preset") {
  const auto cfg = paper_preset().system;
  CHECK(channel_uses("ls", cfg) == 256 * 16);
  CHECK(channel_uses("bsa_omp", cfg) == 16 * 16);
  CHECK(channel_uses("ls", cfg) / channel_uses("bsa_omp", cfg) == 16);
  CHECK(channel_uses("ls", cfg) % channel_uses("bsa_omp", cfg) == 0);
}
