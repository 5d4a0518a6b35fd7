// windfield: spatial interpolation of scattered wind observations.
//
// Subcommands cover the full pipeline: ingest and normalize observation
// CSVs, generate synthetic divergence-free datasets, fit spectral and
// reference interpolators, run cross-validated evaluations and paired
// hyperparameter searches, export reconstruction grids and autocorrelation
// tables, and analyze frequency-sampling densities.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
// failure, 1 unexpected failure.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "windfield/errors.hpp"
#include "windfield/pipeline/runs.hpp"

namespace {

using windfield::pipeline::RunConfig;

void add_input(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-i,--input", cfg.input_path, "Observation CSV file")
      ->required();
}

void add_time(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--time", cfg.time,
                  "Slice timestamp (ISO-8601); default: first slice");
}

void add_domain(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--tau-x", cfg.tau_x,
                  "Domain width in metres (rescaled to the unit square)")
      ->capture_default_str();
  sub->add_option("--tau-y", cfg.tau_y, "Domain height in metres")
      ->capture_default_str();
  sub->add_option("--origin-x", cfg.origin_x,
                  "Domain origin easting; default: data bounding box");
  sub->add_option("--origin-y", cfg.origin_y,
                  "Domain origin northing; default: data bounding box");
}

void add_loss(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--lambda", cfg.lambda, "Smoothness penalty weight")
      ->capture_default_str();
  sub->add_option("--eta", cfg.eta, "Divergence penalty weight")
      ->capture_default_str();
  sub->add_option("--gamma-s", cfg.gamma_s,
                  "Derivative scale inside the smoothness weight")
      ->capture_default_str();
}

void add_rff(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-K,--frequencies", cfg.frequency_count,
                  "Number of adaptive frequencies")
      ->capture_default_str();
  sub->add_option("-B,--steps", cfg.step_count, "Chain steps")
      ->capture_default_str();
  sub->add_option("--proposal-sigma", cfg.proposal_sigma,
                  "Scale of the rounded Gaussian proposal")
      ->capture_default_str();
  sub->add_option("--accept-exponent", cfg.accept_exponent,
                  "Exponent in the norm-ratio acceptance rule")
      ->capture_default_str();
}

void add_eval(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-M,--folds", cfg.fold_count, "Cross-validation folds")
      ->capture_default_str();
  sub->add_option("--samples", cfg.sample_count,
                  "Number of slices scored (sampled without replacement)")
      ->capture_default_str();
  sub->add_option("--min-stations", cfg.min_stations,
                  "Usable-slice threshold; default: the fold count");
}

void add_baseline_hyper(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--idw-power", cfg.idw_power,
                  "Inverse-distance weighting exponent")
      ->capture_default_str();
  sub->add_option("--trees", cfg.tree_count, "Forest size")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{
      "windfield: scattered wind-field interpolation and evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Config file (key=value; [subcommand] sections; flags win)");
  app.add_option("--seed", cfg.seed, "Master seed for all randomized stages")
      ->capture_default_str();
  app.add_option("-j,--jobs", cfg.jobs, "Worker threads (0 = all cores)")
      ->capture_default_str();
  app.add_option("-o,--out-dir", cfg.out_dir, "Output directory")
      ->capture_default_str();
  app.add_option("--wind-convention", cfg.wind_convention,
                 "Interpretation of polar wind directions")
      ->check(CLI::IsMember({"heading", "meteo"}))
      ->capture_default_str();
  app.add_option("--exclude-month", cfg.exclude_months,
                 "Drop observations from month YYYY-MM (repeatable)");

  CLI::App* ingest = app.add_subcommand(
      "ingest", "Normalize an observation CSV and summarize it");
  add_input(ingest, cfg);

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic divergence-free dataset");
  add_domain(synth, cfg);
  synth->add_option("--stations", cfg.synth_stations, "Station count")
      ->capture_default_str();
  synth->add_option("--slices", cfg.synth_slices, "Time slice count")
      ->capture_default_str();
  synth->add_option("--modes", cfg.synth_modes,
                    "Stream-function modes per slice")
      ->capture_default_str();
  synth->add_option("--max-index", cfg.synth_max_index,
                    "Largest mode index per axis")
      ->capture_default_str();
  synth->add_option("--noise", cfg.synth_noise,
                    "Measurement noise sigma (m/s)")
      ->capture_default_str();
  synth->add_option("--amplitude", cfg.synth_amplitude,
                    "Stream-function amplitude scale")
      ->capture_default_str();
  synth->add_option("--start", cfg.synth_start, "First slice timestamp")
      ->capture_default_str();
  synth->add_option("--step-seconds", cfg.synth_step_seconds,
                    "Spacing between slices")
      ->capture_default_str();

  CLI::App* fit_rff = app.add_subcommand(
      "fit-rff", "Fit the adaptive spectral model to one slice");
  add_input(fit_rff, cfg);
  add_time(fit_rff, cfg);
  add_domain(fit_rff, cfg);
  add_loss(fit_rff, cfg);
  add_rff(fit_rff, cfg);

  CLI::App* fit_fourier = app.add_subcommand(
      "fit-fourier", "Fit the fixed-grid spectral model to one slice");
  add_input(fit_fourier, cfg);
  add_time(fit_fourier, cfg);
  add_domain(fit_fourier, cfg);
  add_loss(fit_fourier, cfg);
  fit_fourier->add_option("--grid-m", cfg.grid_m, "Grid order M")
      ->capture_default_str();

  CLI::App* fit_baseline = app.add_subcommand(
      "fit-baseline", "Fit a reference interpolator to one slice");
  add_input(fit_baseline, cfg);
  add_time(fit_baseline, cfg);
  fit_baseline
      ->add_option("--model", cfg.model, "nearest, idw, kriging, or forest")
      ->check(CLI::IsMember({"nearest", "idw", "kriging", "forest"}))
      ->required();
  add_baseline_hyper(fit_baseline, cfg);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Cross-validated evaluation of one model");
  add_input(evaluate, cfg);
  evaluate->add_option("--model", cfg.model, "Model to evaluate")
      ->check(CLI::IsMember({"rff", "fourier", "nearest", "idw", "kriging",
                             "forest", "zero", "truth"}))
      ->capture_default_str();
  evaluate->add_option("--truth", cfg.truth_path,
                       "Synthetic truth sidecar (for --model truth)");
  add_eval(evaluate, cfg);
  add_domain(evaluate, cfg);
  add_loss(evaluate, cfg);
  add_rff(evaluate, cfg);
  evaluate->add_option("--grid-m", cfg.grid_m, "Grid order M")
      ->capture_default_str();
  add_baseline_hyper(evaluate, cfg);

  CLI::App* hypersearch = app.add_subcommand(
      "hypersearch", "Paired grid search over the penalty weights");
  add_input(hypersearch, cfg);
  hypersearch
      ->add_option("--lambda-grid", cfg.lambda_grid,
                   "Smoothness penalty values")
      ->expected(-1);
  hypersearch
      ->add_option("--eta-grid", cfg.eta_grid, "Divergence penalty values")
      ->expected(-1);
  add_eval(hypersearch, cfg);
  add_domain(hypersearch, cfg);
  hypersearch->add_option("--gamma-s", cfg.gamma_s,
                          "Derivative scale inside the smoothness weight")
      ->capture_default_str();
  add_rff(hypersearch, cfg);

  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct", "Evaluate a model on a regular grid");
  reconstruct->add_option("--model-file", cfg.model_file,
                          "Serialized model JSON produced by a fit command");
  reconstruct->add_option("-i,--input", cfg.input_path,
                          "Observation CSV (fit on the fly)");
  reconstruct->add_option("--model", cfg.model,
                          "Model kind when fitting on the fly")
      ->check(CLI::IsMember({"rff", "fourier", "nearest", "idw", "kriging",
                             "forest", "zero", "truth"}))
      ->capture_default_str();
  reconstruct->add_option("--truth", cfg.truth_path,
                          "Synthetic truth sidecar (for --model truth)");
  add_time(reconstruct, cfg);
  add_domain(reconstruct, cfg);
  add_loss(reconstruct, cfg);
  add_rff(reconstruct, cfg);
  reconstruct->add_option("--grid-m", cfg.grid_m, "Grid order M")
      ->capture_default_str();
  add_baseline_hyper(reconstruct, cfg);
  reconstruct->add_option("--nx", cfg.nx, "Grid columns")
      ->capture_default_str();
  reconstruct->add_option("--ny", cfg.ny, "Grid rows")->capture_default_str();
  reconstruct->add_option("--xmin", cfg.xmin, "Easting lower bound");
  reconstruct->add_option("--xmax", cfg.xmax, "Easting upper bound");
  reconstruct->add_option("--ymin", cfg.ymin, "Northing lower bound");
  reconstruct->add_option("--ymax", cfg.ymax, "Northing upper bound");
  reconstruct->add_flag("--divergence", cfg.divergence,
                        "Add a central-difference divergence column");

  CLI::App* autocorr = app.add_subcommand(
      "autocorr", "Per-station, per-component sample autocorrelations");
  add_input(autocorr, cfg);
  autocorr->add_option("--max-lag", cfg.max_lag, "Largest lag")
      ->capture_default_str();

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Frequency-sampling density analysis for a spectral profile");
  oracle->add_option("--profile", cfg.profile_path, "Spectral profile JSON")
      ->required();
  oracle->add_option("--resolution", cfg.grid_resolution,
                     "Simplex grid step for the exhaustive check (0 = skip)")
      ->capture_default_str();
  oracle->add_option("--check-draws", cfg.check_draws,
                     "Monte-Carlo draws for the estimator check (0 = skip)")
      ->capture_default_str();
  oracle->add_option("--check-points", cfg.check_points,
                     "Test points for the estimator check")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ingest->parsed()) {
      windfield::pipeline::run_ingest(cfg);
    } else if (synth->parsed()) {
      windfield::pipeline::run_synth(cfg);
    } else if (fit_rff->parsed()) {
      cfg.model = "rff";
      windfield::pipeline::run_fit_rff(cfg);
    } else if (fit_fourier->parsed()) {
      cfg.model = "fourier";
      windfield::pipeline::run_fit_fourier(cfg);
    } else if (fit_baseline->parsed()) {
      windfield::pipeline::run_fit_baseline(cfg);
    } else if (evaluate->parsed()) {
      windfield::pipeline::run_evaluate(cfg);
    } else if (hypersearch->parsed()) {
      cfg.model = "rff";
      windfield::pipeline::run_hypersearch(cfg);
    } else if (reconstruct->parsed()) {
      windfield::pipeline::run_reconstruct(cfg);
    } else if (autocorr->parsed()) {
      windfield::pipeline::run_autocorr(cfg);
    } else if (oracle->parsed()) {
      windfield::pipeline::run_oracle(cfg);
    }
    return 0;
  } catch (const windfield::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const windfield::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const windfield::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
