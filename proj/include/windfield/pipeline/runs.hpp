#pragma once

#include "windfield/pipeline/config.hpp"

namespace windfield::pipeline {

/// Subcommand bodies. Each reads the fields of `config` it needs, writes
/// its artifacts under config.out_dir, and throws ConfigError / DataError /
/// NumericError on failure (mapped to exit codes 2 / 3 / 4 by the CLI).
/// All outputs are deterministic functions of the config: reruns produce
/// byte-identical files.

/// Parses an observation CSV and writes a normalized cartesian-schema copy
/// (observations.csv) plus a dataset summary (ingest_summary.json).
void run_ingest(const RunConfig& config);

/// Generates a divergence-free synthetic dataset: fixed stations, one
/// random stream-function field per slice, optional measurement noise.
/// Writes synthetic.csv and the truth sidecar synthetic_truth.json.
void run_synth(const RunConfig& config);

/// Fits the adaptive spectral model to one slice. Writes model_rff.json,
/// the chain history history_rff.csv, and prints a one-line summary.
void run_fit_rff(const RunConfig& config);

/// Fits the fixed-grid spectral model to one slice. Writes
/// model_fourier.json.
void run_fit_fourier(const RunConfig& config);

/// Fits one of the reference interpolators (nearest, idw, kriging, forest)
/// to one slice. Writes model_<kind>.json with the training slice embedded
/// so the fit can be reproduced exactly on load.
void run_fit_baseline(const RunConfig& config);

/// Cross-validated evaluation of the configured model over a seeded sample
/// of slices. Writes evaluation_<model>.json and
/// evaluation_<model>_slices.csv.
void run_evaluate(const RunConfig& config);

/// Paired grid search over (lambda, eta) for the adaptive spectral model.
/// Writes hypersearch.csv (columns lambda,eta,E_tilde,var) and
/// hypersearch_best.json.
void run_hypersearch(const RunConfig& config);

/// Evaluates a model on a regular grid and writes field.csv with rows
/// x,y,u,v (plus a central-difference divergence column when requested;
/// the grid is inset by one stencil step so the stencil stays inside the
/// model's domain).
void run_reconstruct(const RunConfig& config);

/// Per-station, per-component sample autocorrelations up to the configured
/// lag. Writes autocorr.csv; stations with fewer than two observations or
/// constant series are skipped with a warning.
void run_autocorr(const RunConfig& config);

/// Sampling-density analysis of a spectral profile: optimal density, bound
/// values, optional exhaustive verification and Monte-Carlo estimator
/// check. Writes oracle.json.
void run_oracle(const RunConfig& config);

}  // namespace windfield::pipeline
