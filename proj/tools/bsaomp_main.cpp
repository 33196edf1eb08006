// bsaomp: Monte-Carlo driver for the beam-split-aware channel estimation
// experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure,
// 4 I/O failure.

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsaomp/experiment.hpp"
#include "bsaomp/validation.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string preset = "desk";
  std::string config;
  std::optional<long long> seed;
  std::string out;
  std::string estimators;
  std::optional<int> trials;
  std::string snr;
  std::optional<int> workers;
  bool no_timing = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool monte_carlo) {
  cmd->add_option("--preset", a.preset, "Parameter preset")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  cmd->add_option("--config", a.config, "Key-value config file applied over the preset");
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_option("--out", a.out, "Output CSV path (stdout when omitted)");
  cmd->add_option("--set", a.overrides, "Extra key=value override, repeatable");
  if (monte_carlo) {
    cmd->add_option("--estimators", a.estimators, "Comma-separated estimator labels");
    cmd->add_option("--trials", a.trials, "Monte-Carlo trials");
    cmd->add_option("--snr", a.snr, "Comma-separated SNR grid in dB");
    cmd->add_option("--workers", a.workers, "Worker threads");
    cmd->add_flag("--no-timing", a.no_timing, "Write wall_time_s as 0");
  }
}

bsaomp::ExperimentConfig resolve(const CommonArgs& a, bsaomp::Experiment experiment) {
  using bsaomp::apply_config_value;
  bsaomp::ExperimentConfig cfg = a.preset == "paper" ? bsaomp::paper_preset() : bsaomp::desk_preset();
  cfg.experiment = experiment;
  if (experiment == bsaomp::Experiment::sumrate_vs_snr) {
    cfg.estimators = bsaomp::sumrate_estimator_labels();
  }
  if (!a.config.empty()) {
    cfg = bsaomp::load_config_file(a.config, cfg);
  }
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw bsaomp::ConfigError("--set expects key=value, got '" + kv + "'");
    }
    apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.seed) {
    apply_config_value(cfg, "seed", std::to_string(*a.seed));
  }
  if (!a.estimators.empty()) {
    apply_config_value(cfg, "estimators", a.estimators);
  }
  if (a.trials) {
    apply_config_value(cfg, "trials", std::to_string(*a.trials));
  }
  if (!a.snr.empty()) {
    apply_config_value(cfg, "snr_grid_db", a.snr);
  }
  if (a.workers) {
    apply_config_value(cfg, "workers", std::to_string(*a.workers));
  }
  if (a.no_timing) {
    cfg.record_timing = false;
  }
  if (!a.out.empty()) {
    cfg.output_path = a.out;
  }
  cfg.validate();
  if (a.preset == "paper") {
    std::cerr << "warning: the paper preset (N=256, M=128, Q=2048, K=8) is orders of magnitude "
                 "slower than the desk preset\n";
  }
  return cfg;
}

template <typename Writer>
void write_output(const std::string& path, Writer&& writer) {
  if (path.empty()) {
    writer(std::cout);
    std::cout.flush();
    if (!std::cout) {
      throw IoError("failed writing to stdout");
    }
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  writer(out);
  out.flush();
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beam-split-aware OMP channel estimation experiments"};
  app.require_subcommand(1);

  CommonArgs nmse_args, rate_args, gain_args;
  auto* nmse = app.add_subcommand("nmse", "NMSE versus SNR for the selected estimators");
  add_common(nmse, nmse_args, true);
  auto* rate = app.add_subcommand("sumrate", "Hybrid beamforming sum rate versus SNR");
  add_common(rate, rate_args, true);
  auto* gain = app.add_subcommand("array-gain", "Array-gain spectra with and without correction");
  add_common(gain, gain_args, false);
  std::optional<double> direction;
  gain->add_option("--direction", direction, "Sine of the beam direction (default sin 60 deg)");

  std::uint64_t validate_seed = 1;
  auto* validate = app.add_subcommand("validate", "Run the invariant suite");
  validate->add_option("--seed", validate_seed, "Seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*nmse) {
      const auto cfg = resolve(nmse_args, bsaomp::Experiment::nmse_vs_snr);
      const auto records = bsaomp::run_nmse_experiment(cfg);
      write_output(cfg.output_path, [&](std::ostream& os) { bsaomp::write_csv(os, records); });
    } else if (*rate) {
      const auto cfg = resolve(rate_args, bsaomp::Experiment::sumrate_vs_snr);
      const auto records = bsaomp::run_sumrate_experiment(cfg);
      write_output(cfg.output_path, [&](std::ostream& os) { bsaomp::write_csv(os, records); });
    } else if (*gain) {
      auto cfg = resolve(gain_args, bsaomp::Experiment::array_gain);
      if (direction) {
        bsaomp::apply_config_value(cfg, "array_gain_direction", std::to_string(*direction));
        cfg.validate();
      }
      const auto result = bsaomp::run_array_gain(cfg, cfg.array_gain_direction);
      write_output(cfg.output_path,
                   [&](std::ostream& os) { bsaomp::write_array_gain_csv(os, result); });
      for (const auto& sp : result.spectra) {
        if (sp.subcarrier == 0 || sp.subcarrier == cfg.system.num_subcarriers - 1) {
          std::fprintf(stderr, "%-14s %-4s m=%-4d peak %+.6f  displacement %+.3f deg\n",
                       sp.preset.c_str(), sp.kind.c_str(), sp.subcarrier, sp.peak_direction,
                       sp.peak_displacement_deg);
        }
      }
    } else if (*validate) {
      int failed = 0;
      for (const auto& r : bsaomp::run_invariant_suite(validate_seed)) {
        std::cout << (r.passed ? "ok   " : "FAIL ") << r.name << ": " << r.detail << '\n';
        failed += !r.passed;
      }
      return failed == 0 ? kOk : kNumeric;
    }
  } catch (const bsaomp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
