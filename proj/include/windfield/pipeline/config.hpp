#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "windfield/data_model.hpp"

namespace windfield::pipeline {

/// Fully resolved run configuration. One struct covers every subcommand so
/// a single archived config file reproduces a whole pipeline; each
/// subcommand reads the fields it needs and embeds the resolved values in
/// its outputs.
struct RunConfig {
  static constexpr double kAuto = std::numeric_limits<double>::quiet_NaN();

  // Global.
  std::string input_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = all available cores
  std::string wind_convention = "heading";
  std::vector<std::string> exclude_months;  // "YYYY-MM"

  // Domain rescaling to the unit square. Origin defaults to the lower-left
  // corner of the data bounding box (NaN sentinel = auto).
  double tau_x = 4.0e6;
  double tau_y = 4.0e6;
  double origin_x = kAuto;
  double origin_y = kAuto;

  // Model selection and hyperparameters.
  std::string model = "rff";  // rff|fourier|nearest|idw|kriging|forest|zero|truth
  int frequency_count = 400;  // K
  int step_count = 500;       // B
  double proposal_sigma = 2.25;
  double accept_exponent = 1.4;
  double lambda = 0.01;
  double eta = 0.001;
  double gamma_s = 1.0;
  int grid_m = 10;
  double idw_power = 2.0;
  int tree_count = 200;
  std::string truth_path;  // synthetic truth sidecar, for model = truth

  // Fitting / reconstruction target.
  std::string time;        // ISO timestamp; empty = first slice
  std::string model_file;  // serialized model to load instead of fitting

  // Evaluation.
  int fold_count = 5;    // M
  int sample_count = 500;  // |K|, number of scored slices
  int min_stations = 0;  // extra usable-slice threshold; 0 = fold_count

  // Hyperparameter search grids.
  std::vector<double> lambda_grid;
  std::vector<double> eta_grid;

  // Synthetic data generation.
  int synth_stations = 171;
  int synth_slices = 24;
  int synth_modes = 5;
  int synth_max_index = 3;
  double synth_noise = 0.1;
  double synth_amplitude = 1.0;
  std::string synth_start = "2018-01-01T00:00:00Z";
  int synth_step_seconds = 3600;

  // Field reconstruction grid.
  int nx = 50;
  int ny = 50;
  double xmin = kAuto;
  double xmax = kAuto;
  double ymin = kAuto;
  double ymax = kAuto;
  bool divergence = false;

  // Autocorrelation.
  int max_lag = 300;

  // Oracle runs.
  std::string profile_path;
  double grid_resolution = 0.0;  // 0 = skip the exhaustive search
  int check_draws = 0;           // 0 = skip the Monte-Carlo estimator check
  int check_points = 10;

  data::WindConvention wind() const;
  /// Throws ConfigError on out-of-range values (fold count < 2, sample
  /// count < 1, non-positive tau, unknown model or convention, ...).
  void validate() const;
};

/// The full resolved configuration as JSON; embedded verbatim in every
/// JSON artifact so outputs are self-describing.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace windfield::pipeline
