#include "windfield/pipeline/config.hpp"

#include <cmath>
#include <set>

#include "windfield/errors.hpp"

namespace windfield::pipeline {

namespace {

const std::set<std::string>& known_models() {
  static const std::set<std::string> kinds = {
      "rff", "fourier", "nearest", "idw", "kriging", "forest", "zero", "truth"};
  return kinds;
}

}  // namespace

data::WindConvention RunConfig::wind() const {
  if (wind_convention == "heading") return data::WindConvention::heading;
  if (wind_convention == "meteo") return data::WindConvention::meteo;
  throw ConfigError("unknown wind convention '" + wind_convention +
                    "' (expected heading or meteo)");
}

void RunConfig::validate() const {
  (void)wind();  // throws on unknown conventions
  if (fold_count < 2) throw ConfigError("fold count must be at least 2");
  if (sample_count < 1) throw ConfigError("sample count must be at least 1");
  if (min_stations < 0) throw ConfigError("min stations must be non-negative");
  if (!(tau_x > 0.0) || !(tau_y > 0.0))
    throw ConfigError("tau components must be positive");
  if (known_models().count(model) == 0)
    throw ConfigError("unknown model '" + model + "'");
  if (frequency_count < 1) throw ConfigError("frequency count must be >= 1");
  if (step_count < 0) throw ConfigError("step count must be non-negative");
  if (!(proposal_sigma >= 0.0))
    throw ConfigError("proposal sigma must be non-negative");
  if (!(accept_exponent > 0.0))
    throw ConfigError("acceptance exponent must be positive");
  if (!(lambda >= 0.0) || !(eta >= 0.0) || !(gamma_s >= 0.0))
    throw ConfigError("penalty weights must be non-negative");
  if (grid_m < 0) throw ConfigError("grid order must be non-negative");
  if (!(idw_power > 0.0)) throw ConfigError("idw power must be positive");
  if (tree_count < 1) throw ConfigError("tree count must be >= 1");
  if (synth_stations < 1 || synth_slices < 1)
    throw ConfigError("synthetic station and slice counts must be >= 1");
  if (synth_modes < 1) throw ConfigError("synthetic mode count must be >= 1");
  if (synth_max_index < 1)
    throw ConfigError("synthetic max mode index must be >= 1");
  if (synth_modes > synth_max_index * synth_max_index)
    throw ConfigError("cannot draw " + std::to_string(synth_modes) +
                      " distinct modes from a " +
                      std::to_string(synth_max_index) + "x" +
                      std::to_string(synth_max_index) + " index range");
  if (!(synth_noise >= 0.0))
    throw ConfigError("synthetic noise sigma must be non-negative");
  if (synth_step_seconds < 1)
    throw ConfigError("synthetic time step must be >= 1 second");
  if (nx < 1 || ny < 1) throw ConfigError("grid sizes must be >= 1");
  if (max_lag < 0) throw ConfigError("max lag must be non-negative");
  if (grid_resolution < 0.0 || grid_resolution > 1.0)
    throw ConfigError("grid resolution must lie in [0, 1]");
  if (check_draws < 0) throw ConfigError("check draws must be non-negative");
  if (check_points < 1) throw ConfigError("check points must be >= 1");
}

namespace {

// NaN is not representable in JSON; the auto sentinel becomes null.
nlohmann::json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["input"] = c.input_path;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["wind_convention"] = c.wind_convention;
  j["exclude_months"] = c.exclude_months;
  j["domain"] = {{"tau", {c.tau_x, c.tau_y}},
                 {"origin", {number_or_null(c.origin_x),
                             number_or_null(c.origin_y)}}};
  j["model"] = {{"kind", c.model},
                {"frequency_count", c.frequency_count},
                {"step_count", c.step_count},
                {"proposal_sigma", c.proposal_sigma},
                {"accept_exponent", c.accept_exponent},
                {"lambda", c.lambda},
                {"eta", c.eta},
                {"gamma_s", c.gamma_s},
                {"grid_m", c.grid_m},
                {"idw_power", c.idw_power},
                {"tree_count", c.tree_count},
                {"truth_path", c.truth_path}};
  j["fit"] = {{"time", c.time}, {"model_file", c.model_file}};
  j["evaluation"] = {{"fold_count", c.fold_count},
                     {"sample_count", c.sample_count},
                     {"min_stations", c.min_stations}};
  j["hypersearch"] = {{"lambda_grid", c.lambda_grid},
                      {"eta_grid", c.eta_grid}};
  j["synth"] = {{"stations", c.synth_stations},
                {"slices", c.synth_slices},
                {"modes", c.synth_modes},
                {"max_index", c.synth_max_index},
                {"noise", c.synth_noise},
                {"amplitude", c.synth_amplitude},
                {"start", c.synth_start},
                {"step_seconds", c.synth_step_seconds}};
  j["reconstruct"] = {{"nx", c.nx},
                      {"ny", c.ny},
                      {"xmin", number_or_null(c.xmin)},
                      {"xmax", number_or_null(c.xmax)},
                      {"ymin", number_or_null(c.ymin)},
                      {"ymax", number_or_null(c.ymax)},
                      {"divergence", c.divergence}};
  j["autocorr"] = {{"max_lag", c.max_lag}};
  j["oracle"] = {{"profile", c.profile_path},
                 {"grid_resolution", c.grid_resolution},
                 {"check_draws", c.check_draws},
                 {"check_points", c.check_points}};
  return j;
}

}  // namespace windfield::pipeline
