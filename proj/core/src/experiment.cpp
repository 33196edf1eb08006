#include "bsaomp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "bsaomp/beamforming.hpp"
#include "bsaomp/dictionary.hpp"
#include "bsaomp/estimators.hpp"
#include "bsaomp/rng.hpp"
#include "bsaomp/sounding.hpp"

namespace bsaomp {

namespace {

// Stream tags for derive_seed.
enum : std::uint64_t {
  kPathsStream = 1,
  kPlanStream = 2,
  kNoiseStream = 3,
  kFullNoiseStream = 4,
  kFullPlanStream = 5,
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) {
      throw std::invalid_argument(v);
    }
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) {
      throw std::invalid_argument(v);
    }
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") {
    return true;
  }
  if (v == "false" || v == "0" || v == "off" || v == "no") {
    return false;
  }
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    out += (out.empty() ? "" : ", ") + s;
  }
  return out;
}

void check_labels(const std::vector<std::string>& labels, const std::vector<std::string>& valid) {
  if (labels.empty()) {
    throw ConfigError("no estimators selected; valid labels: " + join(valid));
  }
  for (const auto& l : labels) {
    if (std::find(valid.begin(), valid.end(), l) == valid.end()) {
      throw ConfigError("unknown estimator '" + l + "'; valid labels: " + join(valid));
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) {
        throw ConfigError("estimator '" + labels[i] + "' listed twice");
      }
    }
  }
}

/// Runs body(t) for t in [0, count) on `workers` threads. Results must be
/// written to per-trial slots so that aggregation order never depends on
/// scheduling.
void parallel_trials(int count, int workers, const std::function<void(int)>& body) {
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int t = 0; t < count; ++t) {
      body(t);
    }
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int t = next++; t < count; t = next++) {
        try {
          body(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) {
            error = std::current_exception();
          }
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

PathSampling sampling_of(const ExperimentConfig& cfg) {
  PathSampling s;
  s.grid_mode = cfg.grid_mode;
  s.min_separation_cells = cfg.min_separation_cells;
  return s;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Per-trial accumulators: [label][snr].
struct TrialSums {
  std::vector<std::vector<double>> value;
  std::vector<std::vector<double>> seconds;

  TrialSums(std::size_t labels, std::size_t snrs)
      : value(labels, std::vector<double>(snrs, 0.0)),
        seconds(labels, std::vector<double>(snrs, 0.0)) {}
};

}  // namespace

void ExperimentConfig::validate() const {
  try {
    system.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (trials < 1) {
    throw ConfigError("trials must be >= 1");
  }
  if (snr_grid_db.empty()) {
    throw ConfigError("snr_grid_db must not be empty");
  }
  if (workers < 1) {
    throw ConfigError("workers must be >= 1");
  }
  if (min_separation_cells < 1) {
    throw ConfigError("min_separation_cells must be >= 1");
  }
  if (std::abs(array_gain_direction) > 1.0) {
    throw ConfigError("array_gain_direction must lie in [-1, 1]");
  }
  switch (experiment) {
    case Experiment::nmse_vs_snr:
      check_labels(estimators, nmse_estimator_labels());
      break;
    case Experiment::sumrate_vs_snr:
      check_labels(estimators, sumrate_estimator_labels());
      break;
    case Experiment::array_gain:
      break;
  }
}

ExperimentConfig desk_preset() {
  ExperimentConfig cfg;
  cfg.system.carrier_hz = 300e9;
  cfg.system.bandwidth_hz = 30e9;
  cfg.system.num_subcarriers = 16;
  cfg.system.bs_antennas = 64;
  cfg.system.ue_antennas = 8;
  cfg.system.num_users = 2;
  cfg.system.num_rf_chains = 2;
  cfg.system.num_paths = 3;
  cfg.system.grid_size = 512;
  cfg.system.tx_pilots = 16;
  cfg.system.rx_pilots = 16;
  cfg.trials = 200;
  return cfg;
}

ExperimentConfig paper_preset() {
  ExperimentConfig cfg;
  cfg.system.carrier_hz = 300e9;
  cfg.system.bandwidth_hz = 30e9;
  cfg.system.num_subcarriers = 128;
  cfg.system.bs_antennas = 256;
  cfg.system.ue_antennas = 16;
  cfg.system.num_users = 8;
  cfg.system.num_rf_chains = 8;
  cfg.system.num_paths = 3;
  cfg.system.grid_size = 8 * 256;
  cfg.system.tx_pilots = 16;
  cfg.system.rx_pilots = 16;
  cfg.trials = 200;
  return cfg;
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::nmse_vs_snr:
      return "nmse_vs_snr";
    case Experiment::sumrate_vs_snr:
      return "sumrate_vs_snr";
    case Experiment::array_gain:
      return "array_gain";
  }
  return "unknown";
}

std::string to_string(GridMode g) { return g == GridMode::on_grid ? "on_grid" : "off_grid"; }

void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto& s = cfg.system;
  auto as_int = [&] {
    const long long i = parse_int(key, v);
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
      throw ConfigError("config key '" + key + "': value out of range");
    }
    return static_cast<int>(i);
  };
  if (key == "carrier_hz") {
    s.carrier_hz = parse_double(key, v);
  } else if (key == "bandwidth_hz") {
    s.bandwidth_hz = parse_double(key, v);
  } else if (key == "num_subcarriers") {
    s.num_subcarriers = as_int();
  } else if (key == "bs_antennas") {
    s.bs_antennas = as_int();
  } else if (key == "ue_antennas") {
    s.ue_antennas = as_int();
  } else if (key == "num_users") {
    s.num_users = as_int();
  } else if (key == "num_paths") {
    s.num_paths = as_int();
  } else if (key == "num_rf_chains") {
    s.num_rf_chains = as_int();
  } else if (key == "grid_size") {
    s.grid_size = as_int();
  } else if (key == "tx_pilots") {
    s.tx_pilots = as_int();
  } else if (key == "rx_pilots") {
    s.rx_pilots = as_int();
  } else if (key == "snr_grid_db") {
    cfg.snr_grid_db.clear();
    for (const auto& item : split_list(v)) {
      cfg.snr_grid_db.push_back(parse_double(key, item));
    }
  } else if (key == "trials") {
    cfg.trials = as_int();
  } else if (key == "seed") {
    const long long seed = parse_int(key, v);
    if (seed < 0) {
      throw ConfigError("seed must be non-negative");
    }
    cfg.seed = static_cast<std::uint64_t>(seed);
  } else if (key == "experiment") {
    if (v == "nmse_vs_snr" || v == "nmse") {
      cfg.experiment = Experiment::nmse_vs_snr;
    } else if (v == "sumrate_vs_snr" || v == "sumrate") {
      cfg.experiment = Experiment::sumrate_vs_snr;
    } else if (v == "array_gain" || v == "array-gain") {
      cfg.experiment = Experiment::array_gain;
    } else {
      throw ConfigError("unknown experiment '" + v +
                        "'; valid: nmse_vs_snr, sumrate_vs_snr, array_gain");
    }
  } else if (key == "estimators") {
    cfg.estimators = split_list(v);
  } else if (key == "grid_mode") {
    if (v == "on_grid") {
      cfg.grid_mode = GridMode::on_grid;
    } else if (v == "off_grid") {
      cfg.grid_mode = GridMode::off_grid;
    } else {
      throw ConfigError("grid_mode must be on_grid or off_grid, got '" + v + "'");
    }
  } else if (key == "min_separation_cells") {
    cfg.min_separation_cells = as_int();
  } else if (key == "output_path") {
    cfg.output_path = v;
  } else if (key == "workers") {
    cfg.workers = as_int();
  } else if (key == "record_timing") {
    cfg.record_timing = parse_bool(key, v);
  } else if (key == "array_gain_direction") {
    cfg.array_gain_direction = parse_double(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(base, buf.str());
  return base;
}

const std::vector<std::string>& nmse_estimator_labels() {
  static const std::vector<std::string> labels{"bsa_omp", "omp", "ls", "oracle_ls", "mmse"};
  return labels;
}

const std::vector<std::string>& sumrate_estimator_labels() {
  static const std::vector<std::string> labels{"fully_digital", "bsa_omp", "omp"};
  return labels;
}

long long channel_uses(const std::string& label, const SystemConfig& cfg) {
  if (label == "ls" || label == "mmse") {
    return static_cast<long long>(cfg.bs_antennas) * cfg.ue_antennas;
  }
  if (label == "bsa_omp" || label == "omp" || label == "oracle_ls") {
    return static_cast<long long>(cfg.tx_pilots) * cfg.rx_pilots;
  }
  if (label == "fully_digital") {
    return 0;
  }
  throw ConfigError("unknown estimator '" + label + "'");
}

std::vector<MetricRecord> run_nmse_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.experiment = Experiment::nmse_vs_snr;
  cfg.validate();
  const SystemConfig& sys = cfg.system;
  const auto& labels = cfg.estimators;
  const std::size_t S = cfg.snr_grid_db.size();
  const std::size_t E = labels.size();

  const bool want_bsa = contains(labels, "bsa_omp");
  const bool want_omp = contains(labels, "omp");
  const bool want_ls = contains(labels, "ls");
  const bool want_mmse = contains(labels, "mmse");
  const bool want_full = want_ls || want_mmse;

  const PhysicalGrid grid(sys.grid_size);
  const BsaDictionary bsa_dict(sys, grid, BsaDictionary::Kind::beam_split_aware);
  const BsaDictionary flat_dict(sys, grid, BsaDictionary::Kind::frequency_flat);

  // LS and MMSE share one full-size sounding plan (N * N-bar channel uses).
  std::optional<KroneckerOperator> full_op;
  std::vector<MmseEstimator> mmse;
  if (want_full) {
    full_op.emplace(random_pilot_plan(sys.bs_antennas, sys.bs_antennas, sys.ue_antennas,
                                      sys.ue_antennas, derive_seed(cfg.seed, {kFullPlanStream})));
    if (want_mmse) {
      mmse.reserve(static_cast<std::size_t>(sys.num_subcarriers));
      for (int m = 0; m < sys.num_subcarriers; ++m) {
        mmse.emplace_back(*full_op, channel_covariance(sys, m, cfg.grid_mode));
      }
    }
  }

  OmpOptions omp_opts;
  omp_opts.num_paths = sys.num_paths;

  std::vector<TrialSums> per_trial(static_cast<std::size_t>(cfg.trials), TrialSums(E, S));

  auto trial_body = [&](int t) {
    auto& out = per_trial[static_cast<std::size_t>(t)];
    const auto tt = static_cast<std::uint64_t>(t);
    const PathSet paths =
        sample_paths(sys, derive_seed(cfg.seed, {kPathsStream, tt}), sampling_of(cfg));
    const PilotPlan plan = random_pilot_plan(sys, derive_seed(cfg.seed, {kPlanStream, tt}));
    std::optional<SensingKernel> bsa_kernel, flat_kernel;
    if (want_bsa) {
      bsa_kernel.emplace(plan, bsa_dict);
    }
    if (want_omp) {
      flat_kernel.emplace(plan, flat_dict);
    }
    const double norm = 1.0 / (sys.num_users * static_cast<double>(sys.num_subcarriers));

    for (int k = 0; k < sys.num_users; ++k) {
      const WidebandChannel H = synthesize_channel(paths, k, sys);
      const auto kk = static_cast<std::uint64_t>(k);
      for (std::size_t s = 0; s < S; ++s) {
        const double snr = cfg.snr_grid_db[s];
        const MeasurementBundle y =
            measure(H, plan, snr, derive_seed(cfg.seed, {kNoiseStream, tt, kk, s}));
        std::optional<MeasurementBundle> y_full;
        if (want_full) {
          y_full = measure(H, full_op->plan(), snr,
                           derive_seed(cfg.seed, {kFullNoiseStream, tt, kk, s}));
        }
        for (std::size_t e = 0; e < E; ++e) {
          const auto start = Clock::now();
          WidebandChannel est;
          const std::string& label = labels[e];
          if (label == "bsa_omp") {
            est = bsa_omp(y, *bsa_kernel, omp_opts).channel_est;
          } else if (label == "omp") {
            est = vanilla_omp(y, *flat_kernel, omp_opts).channel_est;
          } else if (label == "oracle_ls") {
            est = oracle_ls_estimate(y, plan, paths.user(k), sys);
          } else if (label == "ls") {
            est = ls_estimate(*y_full, *full_op);
          } else if (label == "mmse") {
            for (int m = 0; m < sys.num_subcarriers; ++m) {
              const CVector h = mmse[static_cast<std::size_t>(m)].estimate(
                  y_full->y[static_cast<std::size_t>(m)], y_full->noise_variance);
              est.subcarriers.push_back(
                  Eigen::Map<const CMatrix>(h.data(), sys.ue_antennas, sys.bs_antennas));
            }
          }
          double acc = 0.0;
          for (int m = 0; m < sys.num_subcarriers; ++m) {
            acc += nmse(H[m], est[m]);
          }
          out.value[e][s] += acc * norm;
          out.seconds[e][s] += seconds_since(start);
        }
      }
    }
  };
  parallel_trials(cfg.trials, cfg.workers, trial_body);

  std::vector<MetricRecord> records;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t e = 0; e < E; ++e) {
      double value = 0.0;
      double secs = 0.0;
      for (const auto& tr : per_trial) {
        value += tr.value[e][s];
        secs += tr.seconds[e][s];
      }
      value /= cfg.trials;
      MetricRecord r;
      r.experiment = to_string(Experiment::nmse_vs_snr);
      r.label = labels[e];
      r.snr_db = cfg.snr_grid_db[s];
      r.metric = "nmse";
      r.value = value;
      r.value_db = to_db(value);
      r.trials = cfg.trials;
      r.seed = cfg.seed;
      r.wall_time_s = cfg.record_timing ? secs : 0.0;
      r.channel_uses = channel_uses(labels[e], sys);
      records.push_back(r);
    }
  }
  return records;
}

std::vector<MetricRecord> run_sumrate_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.experiment = Experiment::sumrate_vs_snr;
  cfg.validate();
  const SystemConfig& sys = cfg.system;
  const auto& labels = cfg.estimators;
  const std::size_t S = cfg.snr_grid_db.size();
  const std::size_t E = labels.size();
  const bool want_bsa = contains(labels, "bsa_omp");
  const bool want_omp = contains(labels, "omp");

  const PhysicalGrid grid(sys.grid_size);
  const BsaDictionary bsa_dict(sys, grid, BsaDictionary::Kind::beam_split_aware);
  const BsaDictionary flat_dict(sys, grid, BsaDictionary::Kind::frequency_flat);
  OmpOptions omp_opts;
  omp_opts.num_paths = sys.num_paths;
  constexpr double rho = 1.0;

  std::vector<TrialSums> per_trial(static_cast<std::size_t>(cfg.trials), TrialSums(E, S));

  auto trial_body = [&](int t) {
    auto& out = per_trial[static_cast<std::size_t>(t)];
    const auto tt = static_cast<std::uint64_t>(t);
    const PathSet paths =
        sample_paths(sys, derive_seed(cfg.seed, {kPathsStream, tt}), sampling_of(cfg));
    const PilotPlan plan = random_pilot_plan(sys, derive_seed(cfg.seed, {kPlanStream, tt}));
    std::optional<SensingKernel> bsa_kernel, flat_kernel;
    if (want_bsa) {
      bsa_kernel.emplace(plan, bsa_dict);
    }
    if (want_omp) {
      flat_kernel.emplace(plan, flat_dict);
    }
    std::vector<WidebandChannel> truth;
    for (int k = 0; k < sys.num_users; ++k) {
      truth.push_back(synthesize_channel(paths, k, sys));
    }
    for (std::size_t s = 0; s < S; ++s) {
      const double snr = cfg.snr_grid_db[s];
      const double noise = noise_variance_from_snr_db(snr);
      std::vector<MeasurementBundle> y;
      for (int k = 0; k < sys.num_users; ++k) {
        const auto kk = static_cast<std::uint64_t>(k);
        y.push_back(measure(truth[static_cast<std::size_t>(k)], plan, snr,
                            derive_seed(cfg.seed, {kNoiseStream, tt, kk, s})));
      }
      for (std::size_t e = 0; e < E; ++e) {
        const auto start = Clock::now();
        const std::string& label = labels[e];
        double rate = 0.0;
        if (label == "fully_digital") {
          rate = sum_rate(truth, fully_digital(truth, rho, noise), rho, noise);
        } else {
          const bool bsa = label == "bsa_omp";
          std::vector<WidebandChannel> est;
          for (int k = 0; k < sys.num_users; ++k) {
            const auto& yk = y[static_cast<std::size_t>(k)];
            est.push_back(bsa ? bsa_omp(yk, *bsa_kernel, omp_opts).channel_est
                              : vanilla_omp(yk, *flat_kernel, omp_opts).channel_est);
          }
          const auto bf = design_hybrid(est, bsa ? bsa_dict : flat_dict, rho, noise);
          rate = sum_rate(truth, bf, rho, noise);
        }
        out.value[e][s] += rate;
        out.seconds[e][s] += seconds_since(start);
      }
    }
  };
  parallel_trials(cfg.trials, cfg.workers, trial_body);

  std::vector<MetricRecord> records;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t e = 0; e < E; ++e) {
      double value = 0.0;
      double secs = 0.0;
      for (const auto& tr : per_trial) {
        value += tr.value[e][s];
        secs += tr.seconds[e][s];
      }
      MetricRecord r;
      r.experiment = to_string(Experiment::sumrate_vs_snr);
      r.label = labels[e];
      r.snr_db = cfg.snr_grid_db[s];
      r.metric = "sum_rate";
      r.value = value / cfg.trials;
      r.value_db = std::numeric_limits<double>::quiet_NaN();
      r.trials = cfg.trials;
      r.seed = cfg.seed;
      r.wall_time_s = cfg.record_timing ? secs : 0.0;
      r.channel_uses = channel_uses(labels[e], sys);
      records.push_back(r);
    }
  }
  return records;
}

const std::vector<ArrayGainPreset>& array_gain_presets() {
  static const std::vector<ArrayGainPreset> presets{
      {"3.5GHz_0.1GHz", 3.5e9, 0.1e9},
      {"28GHz_2GHz", 28e9, 2e9},
      {"300GHz_30GHz", 300e9, 30e9},
  };
  return presets;
}

RVector array_gain_probe_grid() {
  constexpr int kHalf = 1126;  // 1126/1024 ~ 1.0996
  RVector probe(2 * kHalf + 1);
  for (int i = -kHalf; i <= kHalf; ++i) {
    probe(i + kHalf) = static_cast<double>(i) / 1024.0;
  }
  return probe;
}

ArrayGainResult run_array_gain(const ExperimentConfig& cfg, double phi,
                               const std::vector<ArrayGainPreset>& presets) {
  const PhysicalDirection dir(phi);
  ArrayGainResult result;
  result.direction = dir.value();
  result.probe = array_gain_probe_grid();
  for (const auto& preset : presets) {
    SystemConfig sys = cfg.system;
    sys.carrier_hz = preset.carrier_hz;
    sys.bandwidth_hz = preset.bandwidth_hz;
    try {
      sys.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(sys.bs_antennas));
    for (int m = 0; m < sys.num_subcarriers; ++m) {
      const CVector beam =
          norm * steering_vector(spatial_direction(dir, sys, m).value, sys.bs_antennas);
      for (const auto kind : {ProbeKind::frequency_flat, ProbeKind::beam_split_aware}) {
        ArrayGainSpectrum sp;
        sp.preset = preset.name;
        sp.carrier_hz = preset.carrier_hz;
        sp.bandwidth_hz = preset.bandwidth_hz;
        sp.kind = kind == ProbeKind::frequency_flat ? "flat" : "bsa";
        sp.subcarrier = m;
        sp.gain = array_gain_spectrum(beam, sys, m, result.probe, kind);
        // Grating lobes repeat outside [-1, 1]; only physical sines are candidates.
        Index peak = -1;
        for (Index i = 0; i < result.probe.size(); ++i) {
          if (std::abs(result.probe(i)) <= 1.0 && (peak < 0 || sp.gain(i) > sp.gain(peak))) {
            peak = i;
          }
        }
        sp.peak_direction = result.probe(peak);
        sp.peak_displacement_deg = sine_to_degrees(sp.peak_direction) - dir.degrees();
        result.spectra.push_back(std::move(sp));
      }
    }
  }
  return result;
}

namespace {

constexpr const char* kCsvHeader =
    "experiment,label,snr_db,metric,value,value_db,trials,seed,wall_time_s,channel_uses";

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17e", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<MetricRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.experiment << ',' << r.label << ',' << fmt_double(r.snr_db) << ',' << r.metric << ','
       << fmt_double(r.value) << ',' << fmt_double(r.value_db) << ',' << r.trials << ',' << r.seed
       << ',' << fmt_double(r.wall_time_s) << ',' << r.channel_uses << '\n';
  }
}

void emit_csv(const std::vector<MetricRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  write_csv(out, records);
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing '" + path.string() + "'");
  }
}

std::vector<MetricRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != kCsvHeader) {
    throw std::runtime_error("CSV header mismatch");
  }
  std::vector<MetricRecord> out;
  while (std::getline(is, line)) {
    if (trim(line).empty()) {
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      f.push_back(cell);
    }
    if (f.size() != 10) {
      throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields, expected 10");
    }
    MetricRecord r;
    r.experiment = f[0];
    r.label = f[1];
    r.snr_db = std::strtod(f[2].c_str(), nullptr);
    r.metric = f[3];
    r.value = std::strtod(f[4].c_str(), nullptr);
    r.value_db = std::strtod(f[5].c_str(), nullptr);
    r.trials = std::stoi(f[6]);
    r.seed = std::stoull(f[7]);
    r.wall_time_s = std::strtod(f[8].c_str(), nullptr);
    r.channel_uses = std::stoll(f[9]);
    out.push_back(r);
  }
  return out;
}

void write_array_gain_csv(std::ostream& os, const ArrayGainResult& result) {
  os << "preset,carrier_hz,bandwidth_hz,kind,subcarrier,probe,gain\n";
  for (const auto& sp : result.spectra) {
    for (Index i = 0; i < result.probe.size(); ++i) {
      os << sp.preset << ',' << fmt_double(sp.carrier_hz) << ',' << fmt_double(sp.bandwidth_hz)
         << ',' << sp.kind << ',' << sp.subcarrier << ',' << fmt_double(result.probe(i)) << ','
         << fmt_double(sp.gain(i)) << '\n';
    }
  }
}

}  // namespace bsaomp
