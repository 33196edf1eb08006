// Acceptance suite. Usage: bsaomp_acceptance <criterion 1..10>
// Prints one "criterion N: PASS|FAIL ..." line and exits nonzero on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "bsaomp/array_model.hpp"
#include "bsaomp/channel_model.hpp"
#include "bsaomp/dictionary.hpp"
#include "bsaomp/estimators.hpp"
#include "bsaomp/experiment.hpp"
#include "bsaomp/rng.hpp"
#include "bsaomp/sounding.hpp"

using namespace bsaomp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Tolerances and budgets.
constexpr double kGammaTol = 1e-12;
constexpr double kSplitTol = 1e-9;
constexpr double kWideSplitTargetDeg = 6.0;
constexpr double kWideSplitSlackDeg = 1.5;
constexpr double kSquintLimitDeg = 1.5;
constexpr double kExactNmseDb = -100.0;
constexpr double kScanTol = 1e-10;
constexpr double kGapAt20Db = 5.0;
constexpr double kFloorSpanDb = 3.0;
constexpr double kBsaDropDb = 6.0;
constexpr double kProbeCell = 2.0 / 2048.0;
constexpr double kRateFraction = 0.8;
constexpr double kDeterminismRel = 1e-8;

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double max_edge_displacement(const ArrayGainResult& r, const std::string& preset, int M) {
  double worst = 0.0;
  for (const auto& sp : r.spectra) {
    if (sp.preset == preset && sp.kind == "flat" && (sp.subcarrier == 0 || sp.subcarrier == M - 1)) {
      worst = std::max(worst, std::abs(sp.peak_displacement_deg));
    }
  }
  return worst;
}

Outcome gamma_identity() {
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> dir(-1.0, 1.0);
  std::uniform_int_distribution<int> size(1, 256);
  SystemConfig cfg = paper_preset().system;
  std::uniform_int_distribution<int> sub(0, cfg.num_subcarriers - 1);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const PhysicalDirection phi(dir(rng));
    const int m = sub(rng);
    const Index n = size(rng);
    const CVector lhs = steering_vector(relative_frequency(cfg, m) * phi.value(), n);
    const CVector rhs =
        gamma_transform(phi, cfg, m, n).diagonal.cwiseProduct(steering_vector(phi.value(), n));
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return {worst < kGammaTol, "max |a(eta phi) - Gamma a(phi)| = " + fmt("%.3e", worst)};
}

Outcome split_roundtrip() {
  std::mt19937_64 rng(20240102);
  std::uniform_real_distribution<double> split(-0.95, 0.95);
  std::uniform_int_distribution<int> size(2, 256);
  double worst = 0.0;
  int wrapping = 0;
  for (int i = 0; i < 10000; ++i) {
    const double d = split(rng);
    const Index n = size(rng);
    wrapping += (n - 1) * std::abs(d) > 2.0;
    const double est = estimate_beam_split(gamma_transform_for_split(d, n).diagonal);
    worst = std::max(worst, std::abs(est - d));
  }
  const bool enough_wraps = wrapping >= 5000;
  return {worst < kSplitTol && enough_wraps,
          "max error " + fmt("%.3e", worst) + ", wrap-inducing cases " + std::to_string(wrapping)};
}

Outcome split_magnitude() {
  ExperimentConfig cfg = desk_preset();
  const double phi = std::sin(std::numbers::pi / 3.0);
  const auto r = run_array_gain(cfg, phi);
  const int M = cfg.system.num_subcarriers;
  const double wide = max_edge_displacement(r, "300GHz_30GHz", M);
  const double narrow = max_edge_displacement(r, "28GHz_2GHz", M);
  const bool ok_wide = std::abs(wide - kWideSplitTargetDeg) <= kWideSplitSlackDeg;
  const bool ok_narrow = narrow < kSquintLimitDeg;
  return {ok_wide && ok_narrow, "300/30 GHz edge displacement " + fmt("%.3f deg", wide) +
                                    (ok_wide ? " (ok)" : " (out of range)") +
                                    ", 28/2 GHz edge displacement " + fmt("%.3f deg", narrow) +
                                    (ok_narrow ? " (ok)" : " (not < 1.5 deg)")};
}

Outcome exact_recovery() {
  const SystemConfig sys = desk_preset().system;
  const PhysicalGrid grid(sys.grid_size);
  const BsaDictionary dict(sys, grid, BsaDictionary::Kind::beam_split_aware);
  PathSampling sampling;
  sampling.grid_mode = GridMode::on_grid;
  // One receive-array beamwidth (2 / N-bar) in grid cells.
  sampling.min_separation_cells = (sys.grid_size - 1) / sys.ue_antennas;
  OmpOptions opts;
  opts.num_paths = sys.num_paths;
  int exact = 0;
  double worst_db = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 100; ++t) {
    const PathSet paths = sample_paths(sys, derive_seed(7, {1, static_cast<std::uint64_t>(t)}),
                                       sampling);
    const PilotPlan plan = random_pilot_plan(sys, derive_seed(7, {2, static_cast<std::uint64_t>(t)}));
    const SensingKernel kernel(plan, dict);
    const auto& user = paths.user(0);
    const WidebandChannel H = synthesize_channel(paths, 0, sys);
    const MeasurementBundle y = measure(H, plan, std::numeric_limits<double>::infinity(), 0);
    const SparseEstimate est = bsa_omp(y, kernel, opts);
    std::vector<std::pair<int, int>> truth, found;
    for (const auto& p : user) {
      truth.emplace_back(p.doa_index, p.dod_index);
    }
    for (int l = 0; l < est.num_paths(); ++l) {
      found.emplace_back(est.rx_support[static_cast<std::size_t>(l)],
                         est.tx_support[static_cast<std::size_t>(l)]);
    }
    std::sort(truth.begin(), truth.end());
    std::sort(found.begin(), found.end());
    const double db = to_db(nmse(H, est.channel_est));
    worst_db = std::max(worst_db, db);
    exact += truth == found && db < kExactNmseDb;
  }
  return {exact == 100, std::to_string(exact) + "/100 exact, worst NMSE " +
                            fmt("%.1f dB", worst_db)};
}

Outcome scan_equivalence() {
  double worst = 0.0;
  int instances = 0;
  std::uint64_t seed = 11;
  for (int N : {2, 4, 8}) {
    for (int Nr : {1, 2, 4}) {
      for (int Q : {8, 16, 32}) {
        for (int P : {1, 2, 4}) {
          SystemConfig sys;
          sys.num_subcarriers = 4;
          sys.bs_antennas = N;
          sys.ue_antennas = Nr;
          sys.grid_size = Q;
          sys.tx_pilots = P;
          sys.rx_pilots = P;
          const PhysicalGrid grid(Q);
          const BsaDictionary dict(sys, grid, BsaDictionary::Kind::beam_split_aware);
          const PilotPlan plan = random_pilot_plan(sys, ++seed);
          Rng rng = make_rng(seed, {99});
          for (int m = 0; m < sys.num_subcarriers; ++m) {
            CVector r(P * P);
            for (Index i = 0; i < r.size(); ++i) {
              r(i) = complex_normal(rng, 1.0);
            }
            const RMatrix fast = correlate_all_atoms(r, plan, dict, m);
            for (int qr = 0; qr < Q; ++qr) {
              for (int qt = 0; qt < Q; ++qt) {
                const double dense = std::abs(sensing_column(plan, dict, m, qr, qt).dot(r));
                worst = std::max(worst, std::abs(dense - fast(qr, qt)));
              }
            }
            ++instances;
          }
        }
      }
    }
  }
  return {worst < kScanTol,
          std::to_string(instances) + " instances, max deviation " + fmt("%.3e", worst)};
}

std::map<std::string, std::map<double, double>> by_label(const std::vector<MetricRecord>& recs,
                                                         bool db) {
  std::map<std::string, std::map<double, double>> out;
  for (const auto& r : recs) {
    out[r.label][r.snr_db] = db ? r.value_db : r.value;
  }
  return out;
}

Outcome nmse_curves() {
  ExperimentConfig cfg = desk_preset();
  cfg.trials = 200;
  cfg.snr_grid_db = {-10, 0, 10, 20, 30};
  cfg.estimators = {"bsa_omp", "omp", "oracle_ls"};
  cfg.record_timing = false;
  const auto curves = by_label(run_nmse_experiment(cfg), true);
  const auto& bsa = curves.at("bsa_omp");
  const auto& omp = curves.at("omp");
  const auto& oracle = curves.at("oracle_ls");
  bool a = true, c = true;
  std::ostringstream detail;
  for (double s : cfg.snr_grid_db) {
    if (s >= 0.0) {
      a = a && bsa.at(s) < omp.at(s);
    }
    c = c && oracle.at(s) <= bsa.at(s);
    detail << "[" << s << " dB: bsa " << fmt("%.2f", bsa.at(s)) << ", omp "
           << fmt("%.2f", omp.at(s)) << ", oracle " << fmt("%.2f", oracle.at(s)) << "] ";
  }
  const double gap = omp.at(20) - bsa.at(20);
  a = a && gap >= kGapAt20Db;
  const bool floor = std::abs(omp.at(30) - omp.at(20)) <= kFloorSpanDb;
  const bool drop = bsa.at(20) - bsa.at(30) >= kBsaDropDb;
  detail << "gap@20 " << fmt("%.2f dB", gap) << "; (a) " << (a ? "ok" : "fail") << " (b) "
         << (floor && drop ? "ok" : "fail") << " (c) " << (c ? "ok" : "fail");
  return {a && floor && drop && c, detail.str()};
}

Outcome corrected_peaks() {
  const ExperimentConfig cfg = desk_preset();
  const double phi = std::sin(std::numbers::pi / 3.0);
  const auto r = run_array_gain(cfg, phi);
  double worst = 0.0;
  int spectra = 0;
  for (const auto& sp : r.spectra) {
    if (sp.kind == "bsa") {
      worst = std::max(worst, std::abs(sp.peak_direction - phi));
      ++spectra;
    }
  }
  return {worst <= kProbeCell && spectra > 0,
          std::to_string(spectra) + " corrected spectra, max peak offset " + fmt("%.3e", worst)};
}

Outcome sumrate_curves() {
  ExperimentConfig cfg = desk_preset();
  cfg.trials = 200;
  cfg.snr_grid_db = {-10, 0, 10, 20, 30};
  cfg.estimators = {"fully_digital", "bsa_omp", "omp"};
  cfg.record_timing = false;
  const auto curves = by_label(run_sumrate_experiment(cfg), false);
  const auto& fd = curves.at("fully_digital");
  const auto& bsa = curves.at("bsa_omp");
  const auto& omp = curves.at("omp");
  bool order = true;
  std::ostringstream detail;
  for (double s : cfg.snr_grid_db) {
    if (s >= 10.0) {
      order = order && fd.at(s) >= bsa.at(s) && bsa.at(s) >= omp.at(s);
    }
    detail << "[" << s << " dB: fd " << fmt("%.2f", fd.at(s)) << ", bsa " << fmt("%.2f", bsa.at(s))
           << ", omp " << fmt("%.2f", omp.at(s)) << "] ";
  }
  ExperimentConfig single = cfg;
  single.system.num_paths = 1;
  single.snr_grid_db = {10};
  single.estimators = {"fully_digital", "bsa_omp"};
  const auto one = by_label(run_sumrate_experiment(single), false);
  const double ratio = one.at("bsa_omp").at(10) / one.at("fully_digital").at(10);
  const bool frac = ratio >= kRateFraction;
  detail << "L=1 ratio@10 " << fmt("%.3f", ratio) << "; ordering " << (order ? "ok" : "fail");
  return {order && frac, detail.str()};
}

Outcome overhead() {
  const SystemConfig sys = paper_preset().system;
  const long long ls = channel_uses("ls", sys);
  const long long bsa = channel_uses("bsa_omp", sys);
  const bool exact = bsa > 0 && ls % bsa == 0 && ls / bsa == 16;
  return {exact, "LS " + std::to_string(ls) + " / BSA-OMP " + std::to_string(bsa) + " channel uses"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + BSAOMP_CLI_PATH + "\" " + args;
  return std::system(cmd.c_str());
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "bsaomp_acceptance_determinism";
  std::filesystem::create_directories(dir);
  const std::string common = "nmse --preset desk --seed 4242 --trials 20 --no-timing --out ";
  const auto a = dir / "w1a.csv", b = dir / "w1b.csv", c = dir / "w3.csv";
  if (run_cli(common + "\"" + a.string() + "\" --workers 1") != 0 ||
      run_cli(common + "\"" + b.string() + "\" --workers 1") != 0 ||
      run_cli(common + "\"" + c.string() + "\" --workers 3") != 0) {
    return {false, "CLI invocation failed"};
  }
  const bool bitwise = slurp(a) == slurp(b);
  std::ifstream ia(a), ic(c);
  const auto ra = read_csv(ia);
  const auto rc = read_csv(ic);
  double worst = 0.0;
  bool same_shape = ra.size() == rc.size() && !ra.empty();
  for (std::size_t i = 0; same_shape && i < ra.size(); ++i) {
    same_shape = ra[i].label == rc[i].label && ra[i].snr_db == rc[i].snr_db;
    for (auto [x, y] : {std::pair{ra[i].value, rc[i].value}, {ra[i].value_db, rc[i].value_db}}) {
      worst = std::max(worst, std::abs(x - y) / std::max(std::abs(x), 1e-300));
    }
  }
  std::filesystem::remove_all(dir);
  return {bitwise && same_shape && worst < kDeterminismRel,
          std::string("single-worker bitwise ") + (bitwise ? "identical" : "DIFFERENT") +
              ", 1 vs 3 workers max relative deviation " + fmt("%.3e", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::map<int, Criterion> criteria{
      {1, {"per-subcarrier transform identity", 5.0, gamma_identity}},
      {2, {"beam-split round trip", 5.0, split_roundtrip}},
      {3, {"beam-split magnitude", 1.0, split_magnitude}},
      {4, {"noiseless exact recovery", 120.0, exact_recovery}},
      {5, {"fast scan equals dense scan", 30.0, scan_equivalence}},
      {6, {"NMSE curve ordering", 900.0, nmse_curves}},
      {7, {"corrected array-gain peaks", 10.0, corrected_peaks}},
      {8, {"sum-rate ordering", 900.0, sumrate_curves}},
      {9, {"channel-use ratio", 1.0, overhead}},
      {10, {"determinism across workers", 300.0, determinism}},
  };
  std::vector<int> ids;
  if (argc < 2) {
    for (const auto& [id, _] : criteria) {
      ids.push_back(id);
    }
  } else {
    for (int i = 1; i < argc; ++i) {
      ids.push_back(std::atoi(argv[i]));
    }
  }
  int failures = 0;
  for (int id : ids) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::cout << "criterion " << id << ": FAIL unknown criterion\n";
      ++failures;
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= it->second.budget_s;
    o.pass = o.pass && in_budget;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " "
              << it->second.name << " - " << o.detail << " (" << fmt("%.2f s", secs) << ", budget "
              << fmt("%.0f s", it->second.budget_s) << (in_budget ? "" : ", EXCEEDED") << ")\n";
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
