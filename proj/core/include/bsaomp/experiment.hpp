#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsaomp/array_model.hpp"
#include "bsaomp/channel_model.hpp"

namespace bsaomp {

/// Invalid experiment configuration (unknown key, bad value, unknown label).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { nmse_vs_snr, sumrate_vs_snr, array_gain };

struct ExperimentConfig {
  SystemConfig system;
  std::vector<double> snr_grid_db{-10, 0, 10, 20, 30};
  int trials = 200;
  std::uint64_t seed = 1;
  Experiment experiment = Experiment::nmse_vs_snr;
  std::vector<std::string> estimators{"bsa_omp", "omp", "ls", "oracle_ls", "mmse"};
  GridMode grid_mode = GridMode::on_grid;
  int min_separation_cells = 1;
  std::string output_path;
  int workers = 1;
  /// When false, wall_time_s is written as 0 so repeated runs are byte-identical.
  bool record_timing = true;
  /// Sine-domain direction probed by the array-gain experiment.
  double array_gain_direction = 0.86602540378443865;

  void validate() const;
};

/// Workstation-sized defaults: N=64, N-bar=8, M=16, K=2, L=3, Q=512, P=P-bar=16.
ExperimentConfig desk_preset();
/// Full-size setup: fc=300 GHz, B=30 GHz, M=128, N=256, N-bar=16,
/// P=P-bar=16, N_RF=K=8, L=3, Q=8N.
ExperimentConfig paper_preset();

/// Applies "key = value" lines (# starts a comment). Keys are the field names
/// of SystemConfig and ExperimentConfig; lists are comma separated.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base);

std::string to_string(Experiment e);
std::string to_string(GridMode g);

const std::vector<std::string>& nmse_estimator_labels();
const std::vector<std::string>& sumrate_estimator_labels();

/// Channel uses one sounding round costs the given estimator.
long long channel_uses(const std::string& label, const SystemConfig& cfg);

struct MetricRecord {
  std::string experiment;
  std::string label;
  double snr_db = 0.0;
  std::string metric;  // "nmse" or "sum_rate"
  double value = 0.0;  // linear NMSE or bits/s/Hz
  double value_db = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  long long channel_uses = 0;

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

std::vector<MetricRecord> run_nmse_experiment(const ExperimentConfig& cfg);
std::vector<MetricRecord> run_sumrate_experiment(const ExperimentConfig& cfg);

struct ArrayGainPreset {
  std::string name;
  double carrier_hz = 0.0;
  double bandwidth_hz = 0.0;
};

/// The three (fc, B) pairs plotted side by side: 3.5/0.1, 28/2, 300/30 GHz.
const std::vector<ArrayGainPreset>& array_gain_presets();

struct ArrayGainSpectrum {
  std::string preset;
  double carrier_hz = 0.0;
  double bandwidth_hz = 0.0;
  std::string kind;  // "flat" or "bsa"
  int subcarrier = 0;
  double peak_direction = 0.0;
  /// asin(peak) - asin(phi), degrees.
  double peak_displacement_deg = 0.0;
  RVector gain;
};

struct ArrayGainResult {
  double direction = 0.0;
  RVector probe;
  std::vector<ArrayGainSpectrum> spectra;
};

/// Probe directions k/1024 covering [-1.1, 1.1] (spacing 2/2048).
RVector array_gain_probe_grid();

/// Spectra of the beam-split-corrupted response a(eta_m * phi)/sqrt(N) at
/// every subcarrier, probed with frequency-flat steering vectors (split
/// visible) and with beam-split-aware atoms (aligned at phi).
ArrayGainResult run_array_gain(const ExperimentConfig& cfg, double phi,
                               const std::vector<ArrayGainPreset>& presets = array_gain_presets());

void emit_csv(const std::vector<MetricRecord>& records, const std::filesystem::path& path);
void write_csv(std::ostream& os, const std::vector<MetricRecord>& records);
std::vector<MetricRecord> read_csv(std::istream& is);

void write_array_gain_csv(std::ostream& os, const ArrayGainResult& result);

}  // namespace bsaomp
