#include "windfield/pipeline/runs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "windfield/baselines.hpp"
#include "windfield/errors.hpp"
#include "windfield/evaluation.hpp"
#include "windfield/forest.hpp"
#include "windfield/fourier_series.hpp"
#include "windfield/kriging.hpp"
#include "windfield/parallel.hpp"
#include "windfield/rff_trainer.hpp"
#include "windfield/rng.hpp"
#include "windfield/spectral_core.hpp"
#include "windfield/synthetic.hpp"
#include "windfield/theory_oracle.hpp"

namespace windfield::pipeline {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw DataError("failed while writing " + path.string());
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

fs::path out_path(const RunConfig& c, const std::string& name) {
  return fs::path(c.out_dir) / name;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in " + path + ": " + e.what());
  }
}

data::Dataset load_dataset(const RunConfig& c) {
  if (c.input_path.empty())
    throw ConfigError("no input file given (use --input)");
  data::ParseOptions opts;
  opts.wind = c.wind();
  opts.exclude_months = c.exclude_months;
  return data::parse_observations_file(c.input_path, opts);
}

struct Domain {
  Vec2 tau = Vec2(1.0, 1.0);
  Vec2 origin = Vec2(0.0, 0.0);
};

/// Rescaling frame shared by all slices of a run. The origin defaults to
/// the lower-left corner of the data bounding box, which must fit inside
/// the configured tau rectangle.
Domain resolve_domain(const data::Dataset& ds, const RunConfig& c) {
  Domain d;
  d.tau = Vec2(c.tau_x, c.tau_y);
  const bool have_x = !std::isnan(c.origin_x);
  const bool have_y = !std::isnan(c.origin_y);
  if (have_x != have_y)
    throw ConfigError("give both origin components or neither");
  if (have_x) {
    d.origin = Vec2(c.origin_x, c.origin_y);
    return d;
  }
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const auto& slice : ds.slices) {
    for (const auto& p : slice.points) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
  }
  if (!(min_x <= max_x)) throw DataError("dataset has no observations");
  if (max_x - min_x > d.tau.x() || max_y - min_y > d.tau.y())
    throw DataError("data spans " + fmt(max_x - min_x) + " x " +
                    fmt(max_y - min_y) + " m but tau is " + fmt(d.tau.x()) +
                    " x " + fmt(d.tau.y()) + " m; increase tau");
  d.origin = Vec2(min_x, min_y);
  return d;
}

const data::TimeSlice& find_slice(const data::Dataset& ds,
                                  const RunConfig& c) {
  if (ds.slices.empty()) throw DataError("dataset has no observations");
  if (c.time.empty()) return ds.slices.front();
  const std::int64_t t = data::parse_time_iso8601(c.time);
  for (const auto& slice : ds.slices)
    if (slice.time == t) return slice;
  throw DataError("time " + c.time + " not in dataset (" +
                  std::to_string(ds.slices.size()) + " slices from " +
                  data::format_time_iso8601(ds.slices.front().time) + " to " +
                  data::format_time_iso8601(ds.slices.back().time) + ")");
}

spectral::LossParams loss_params(const RunConfig& c) {
  spectral::LossParams p;
  p.lambda = c.lambda;
  p.eta = c.eta;
  p.gamma_s = c.gamma_s;
  p.validate();
  return p;
}

nlohmann::json slice_to_json(const data::TimeSlice& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    rows.push_back({{"id", s.station_ids[i]},
                    {"x", s.points[i].x},
                    {"y", s.points[i].y},
                    {"z", s.points[i].z},
                    {"u", s.velocities[i].x()},
                    {"v", s.velocities[i].y()}});
  }
  return {{"time", data::format_time_iso8601(s.time)},
          {"observations", rows}};
}

data::TimeSlice slice_from_json(const nlohmann::json& j) {
  try {
    data::TimeSlice s;
    s.time = data::parse_time_iso8601(j.at("time").get<std::string>());
    for (const auto& row : j.at("observations")) {
      s.station_ids.push_back(row.at("id").get<std::string>());
      s.points.push_back(Point3{row.at("x").get<double>(),
                                row.at("y").get<double>(),
                                row.at("z").get<double>()});
      s.velocities.emplace_back(row.at("u").get<double>(),
                                row.at("v").get<double>());
    }
    if (s.points.empty()) throw DataError("embedded slice is empty");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed embedded slice: ") + e.what());
  }
}

/// Synthetic truth sidecar: one stream-function field per timestamp.
struct TruthSidecar {
  Vec2 tau = Vec2(1.0, 1.0);
  Vec2 origin = Vec2(0.0, 0.0);
  std::map<std::int64_t, synth::StreamFunctionField> fields;
};

TruthSidecar load_truth(const std::string& path) {
  if (path.empty())
    throw ConfigError("model 'truth' needs the synthetic sidecar (--truth)");
  const nlohmann::json j = read_json_file(path);
  try {
    TruthSidecar t;
    t.tau = Vec2(j.at("tau").at(0).get<double>(),
                 j.at("tau").at(1).get<double>());
    t.origin = Vec2(j.at("origin").at(0).get<double>(),
                    j.at("origin").at(1).get<double>());
    for (const auto& entry : j.at("slices")) {
      synth::StreamFunctionField field;
      field.tau = t.tau;
      field.origin = t.origin;
      for (const auto& mode : entry.at("modes")) {
        synth::StreamMode m;
        m.m = LatticePoint{mode.at(0).get<int>(), mode.at(1).get<int>()};
        m.amplitude = mode.at(2).get<double>();
        field.modes.push_back(m);
      }
      field.validate();
      const std::int64_t time =
          data::parse_time_iso8601(entry.at("time").get<std::string>());
      if (!t.fields.emplace(time, std::move(field)).second)
        throw DataError("duplicate truth slice in " + path);
    }
    if (t.fields.empty()) throw DataError("truth sidecar " + path + " is empty");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed truth sidecar " + path + ": " + e.what());
  }
}

class TruthModel : public Interpolator {
 public:
  explicit TruthModel(synth::StreamFunctionField field)
      : field_(std::move(field)) {}
  Vec2 predict(const Point3& p) const override { return field_.eval_metres(p); }

 private:
  synth::StreamFunctionField field_;
};

rff::RffOptions rff_options(const RunConfig& c, const Domain& dom) {
  rff::RffOptions o;
  o.frequency_count = c.frequency_count;
  o.step_count = c.step_count;
  o.proposal_sigma = c.proposal_sigma;
  o.accept_exponent = c.accept_exponent;
  o.loss = loss_params(c);
  o.tau = dom.tau;
  o.origin = dom.origin;
  o.validate();
  return o;
}

/// Per-slice trainer for the configured model kind. Randomized models
/// derive their stream from (master seed, model tag, slice time), so the
/// same slice always trains identically regardless of scheduling.
eval::Trainer make_trainer(const RunConfig& c, const Domain& dom) {
  const std::uint64_t master = c.seed;
  if (c.model == "zero") return eval::make_zero_trainer();
  if (c.model == "nearest")
    return [](const data::TimeSlice& s) { return baselines::fit_nearest(s); };
  if (c.model == "idw") {
    const double power = c.idw_power;
    return [power](const data::TimeSlice& s) {
      return baselines::fit_idw(s, power);
    };
  }
  if (c.model == "kriging") {
    return [](const data::TimeSlice& s) {
      return std::unique_ptr<Interpolator>(baselines::fit_kriging(s));
    };
  }
  if (c.model == "forest") {
    baselines::ForestOptions o;
    o.tree_count = c.tree_count;
    return [o, master](const data::TimeSlice& s) {
      const auto seed = derive_seed(master, "model-forest",
                                    static_cast<std::uint64_t>(s.time));
      return std::unique_ptr<Interpolator>(baselines::fit_forest(s, o, seed));
    };
  }
  if (c.model == "fourier") {
    fourier::FourierOptions o;
    o.grid_m = c.grid_m;
    o.loss = loss_params(c);
    o.tau = dom.tau;
    o.origin = dom.origin;
    return [o](const data::TimeSlice& s) {
      return std::make_unique<spectral::SpectralModel>(
          fourier::train_fourier_series(s, o));
    };
  }
  if (c.model == "rff") {
    rff::RffOptions o = rff_options(c, dom);
    o.record_history = false;
    return [o, master](const data::TimeSlice& s) {
      rff::RffOptions opts = o;
      opts.seed =
          derive_seed(master, "model-rff", static_cast<std::uint64_t>(s.time));
      return std::make_unique<spectral::SpectralModel>(
          rff::train(s, opts).model);
    };
  }
  if (c.model == "truth") {
    auto sidecar = std::make_shared<TruthSidecar>(load_truth(c.truth_path));
    return [sidecar](const data::TimeSlice& s) {
      const auto it = sidecar->fields.find(s.time);
      if (it == sidecar->fields.end())
        throw DataError("truth sidecar has no field for " +
                        data::format_time_iso8601(s.time));
      return std::make_unique<TruthModel>(it->second);
    };
  }
  throw ConfigError("model '" + c.model + "' cannot be trained");
}

/// Seeded sample (without replacement) of slices with enough stations for
/// the fold count; returned in chronological order.
std::vector<data::TimeSlice> sample_slices(const data::Dataset& ds,
                                           const RunConfig& c) {
  const std::size_t threshold = static_cast<std::size_t>(
      std::max(c.fold_count, c.min_stations == 0 ? c.fold_count
                                                 : c.min_stations));
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < ds.slices.size(); ++i)
    if (ds.slices[i].size() >= threshold) usable.push_back(i);
  const std::size_t wanted = static_cast<std::size_t>(c.sample_count);
  if (usable.size() < wanted)
    throw DataError("evaluation needs " + std::to_string(wanted) +
                    " usable slices (>= " + std::to_string(threshold) +
                    " stations each) but the dataset has " +
                    std::to_string(usable.size()));
  if (usable.size() > wanted) {
    auto rng = make_rng(derive_seed(c.seed, "evaluate-sample"));
    std::shuffle(usable.begin(), usable.end(), rng);
    usable.resize(wanted);
    std::sort(usable.begin(), usable.end());
  }
  std::vector<data::TimeSlice> sample;
  sample.reserve(usable.size());
  for (const std::size_t i : usable) sample.push_back(ds.slices[i]);
  return sample;
}

nlohmann::json report_to_json(const eval::QualityReport& r) {
  return {{"samples", r.samples},
          {"Q_tilde", r.q_tilde},
          {"var_Q_t", r.var_q_t},
          {"var_Q_tilde", r.var_q_tilde},
          {"Q_zero", r.q_zero},
          {"E_tilde", r.e_tilde},
          {"ci_half_width", r.ci_half_width}};
}

}  // namespace

void run_ingest(const RunConfig& c) {
  c.validate();
  const data::Dataset ds = load_dataset(c);
  std::size_t observations = 0;
  for (const auto& s : ds.slices) observations += s.size();
  write_text_file(out_path(c, "observations.csv"),
                  data::write_observations_csv(ds));
  nlohmann::json j;
  j["command"] = "ingest";
  j["config"] = config_to_json(c);
  j["stations"] = ds.stations.size();
  j["slices"] = ds.slices.size();
  j["observations"] = observations;
  j["first_time"] = data::format_time_iso8601(ds.slices.front().time);
  j["last_time"] = data::format_time_iso8601(ds.slices.back().time);
  write_json_file(out_path(c, "ingest_summary.json"), j);
  std::cout << "ingest: " << observations << " observations, "
            << ds.slices.size() << " slices, " << ds.stations.size()
            << " stations -> " << out_path(c, "observations.csv").string()
            << "\n";
}

void run_synth(const RunConfig& c) {
  c.validate();
  const Vec2 tau(c.tau_x, c.tau_y);
  const Vec2 origin(std::isnan(c.origin_x) ? 0.0 : c.origin_x,
                    std::isnan(c.origin_y) ? 0.0 : c.origin_y);
  const auto stations = synth::uniform_stations(
      static_cast<std::size_t>(c.synth_stations),
      derive_seed(c.seed, "synth-stations"), tau, origin);

  std::vector<LatticePoint> index_pool;
  for (int a = 1; a <= c.synth_max_index; ++a)
    for (int b = 1; b <= c.synth_max_index; ++b)
      index_pool.push_back(LatticePoint{a, b});

  const std::int64_t start = data::parse_time_iso8601(c.synth_start);
  data::Dataset ds;
  nlohmann::json slices_meta = nlohmann::json::array();
  for (int s = 0; s < c.synth_slices; ++s) {
    auto rng = make_rng(
        derive_seed(c.seed, "synth-field", static_cast<std::uint64_t>(s)));
    std::vector<LatticePoint> chosen = index_pool;
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(static_cast<std::size_t>(c.synth_modes));
    std::sort(chosen.begin(), chosen.end());
    synth::StreamFunctionField field;
    field.tau = tau;
    field.origin = origin;
    std::normal_distribution<double> normal(0.0, 1.0);
    nlohmann::json modes_meta = nlohmann::json::array();
    for (const auto& m : chosen) {
      synth::StreamMode mode;
      mode.m = m;
      mode.amplitude = c.synth_amplitude * normal(rng);
      field.modes.push_back(mode);
      modes_meta.push_back({m.m1, m.m2, mode.amplitude});
    }
    field.validate();
    const std::int64_t time =
        start + static_cast<std::int64_t>(s) * c.synth_step_seconds;
    ds.slices.push_back(synth::sample_slice(
        field, stations, c.synth_noise,
        derive_seed(c.seed, "synth-noise", static_cast<std::uint64_t>(s)),
        time));
    slices_meta.push_back(
        {{"time", data::format_time_iso8601(time)}, {"modes", modes_meta}});
  }
  write_text_file(out_path(c, "synthetic.csv"),
                  data::write_observations_csv(ds));
  nlohmann::json truth;
  truth["command"] = "synth";
  truth["kind"] = "truth";
  truth["config"] = config_to_json(c);
  truth["tau"] = {tau.x(), tau.y()};
  truth["origin"] = {origin.x(), origin.y()};
  truth["noise_sigma"] = c.synth_noise;
  truth["slices"] = slices_meta;
  write_json_file(out_path(c, "synthetic_truth.json"), truth);
  std::cout << "synth: " << c.synth_slices << " slices x " << c.synth_stations
            << " stations -> " << out_path(c, "synthetic.csv").string()
            << "\n";
}

void run_fit_rff(const RunConfig& c) {
  c.validate();
  const data::Dataset ds = load_dataset(c);
  const Domain dom = resolve_domain(ds, c);
  const data::TimeSlice& slice = find_slice(ds, c);
  rff::RffOptions o = rff_options(c, dom);
  o.record_history = true;
  o.seed = derive_seed(c.seed, "model-rff",
                       static_cast<std::uint64_t>(slice.time));
  const rff::RffResult result = rff::train(slice, o);
  const auto diag = rff::chain_diagnostics(result.history);
  const auto terms = spectral::loss_terms(
      result.model.lattice(), result.model.beta(),
      spectral::unit_positions(slice, dom.tau, dom.origin), slice.velocities,
      o.loss);
  nlohmann::json j;
  j["command"] = "fit-rff";
  j["kind"] = "rff";
  j["config"] = config_to_json(c);
  j["time"] = data::format_time_iso8601(slice.time);
  j["stations"] = slice.size();
  j["model"] = result.model.to_json();
  j["summary"] = {{"loss_data", terms.data},
                  {"loss_sobolev", terms.sobolev},
                  {"loss_divergence", terms.divergence},
                  {"loss_total", terms.total(o.loss)},
                  {"acceptance_rate", diag.acceptance_rate},
                  {"clamped_proposals", diag.clamped_proposals}};
  write_json_file(out_path(c, "model_rff.json"), j);
  write_text_file(out_path(c, "history_rff.csv"),
                  rff::history_to_csv(result.history));
  std::cout << "fit-rff: " << slice.size() << " stations at "
            << data::format_time_iso8601(slice.time)
            << ", loss=" << fmt(terms.total(o.loss))
            << ", acceptance=" << fmt(diag.acceptance_rate) << " -> "
            << out_path(c, "model_rff.json").string() << "\n";
}

void run_fit_fourier(const RunConfig& c) {
  c.validate();
  const data::Dataset ds = load_dataset(c);
  const Domain dom = resolve_domain(ds, c);
  const data::TimeSlice& slice = find_slice(ds, c);
  fourier::FourierOptions o;
  o.grid_m = c.grid_m;
  o.loss = loss_params(c);
  o.tau = dom.tau;
  o.origin = dom.origin;
  const spectral::SpectralModel model = fourier::train_fourier_series(slice, o);
  const auto terms = spectral::loss_terms(
      model.lattice(), model.beta(),
      spectral::unit_positions(slice, dom.tau, dom.origin), slice.velocities,
      o.loss);
  nlohmann::json j;
  j["command"] = "fit-fourier";
  j["kind"] = "fourier";
  j["config"] = config_to_json(c);
  j["time"] = data::format_time_iso8601(slice.time);
  j["stations"] = slice.size();
  j["model"] = model.to_json();
  j["summary"] = {{"loss_data", terms.data},
                  {"loss_sobolev", terms.sobolev},
                  {"loss_divergence", terms.divergence},
                  {"loss_total", terms.total(o.loss)}};
  write_json_file(out_path(c, "model_fourier.json"), j);
  std::cout << "fit-fourier: " << slice.size() << " stations at "
            << data::format_time_iso8601(slice.time)
            << ", loss=" << fmt(terms.total(o.loss)) << " -> "
            << out_path(c, "model_fourier.json").string() << "\n";
}

void run_fit_baseline(const RunConfig& c) {
  c.validate();
  const bool known = c.model == "nearest" || c.model == "idw" ||
                     c.model == "kriging" || c.model == "forest";
  if (!known)
    throw ConfigError("fit-baseline supports nearest, idw, kriging, forest; "
                      "got '" + c.model + "'");
  const data::Dataset ds = load_dataset(c);
  const data::TimeSlice& slice = find_slice(ds, c);
  nlohmann::json j;
  j["command"] = "fit-baseline";
  j["kind"] = c.model;
  j["config"] = config_to_json(c);
  j["time"] = data::format_time_iso8601(slice.time);
  j["stations"] = slice.size();
  j["slice"] = slice_to_json(slice);
  if (c.model == "nearest") {
    baselines::fit_nearest(slice);  // validates the slice
  } else if (c.model == "idw") {
    baselines::fit_idw(slice, c.idw_power);
    j["power"] = c.idw_power;
  } else if (c.model == "kriging") {
    const auto model = baselines::fit_kriging(slice);
    j["variogram"] = {{"nugget", model->variogram().nugget},
                      {"slope", model->variogram().slope}};
  } else {
    const auto seed = derive_seed(c.seed, "model-forest",
                                  static_cast<std::uint64_t>(slice.time));
    baselines::ForestOptions o;
    o.tree_count = c.tree_count;
    baselines::fit_forest(slice, o, seed);
    j["seed"] = seed;
    j["tree_count"] = c.tree_count;
    j["bootstrap"] = o.bootstrap;
  }
  const std::string name = "model_" + c.model + ".json";
  write_json_file(out_path(c, name), j);
  std::cout << "fit-baseline: " << c.model << " on " << slice.size()
            << " stations at " << data::format_time_iso8601(slice.time)
            << " -> " << out_path(c, name).string() << "\n";
}

void run_evaluate(const RunConfig& c) {
  c.validate();
  const data::Dataset ds = load_dataset(c);
  const Domain dom = resolve_domain(ds, c);
  const std::vector<data::TimeSlice> sample = sample_slices(ds, c);
  const eval::Trainer trainer = make_trainer(c, dom);
  const eval::Trainer zero = eval::make_zero_trainer();
  const std::size_t n = sample.size();
  std::vector<eval::SliceScore> scores(n);
  std::vector<eval::SliceScore> zero_scores(n);
  parallel_for_indexed(c.jobs, n, [&](std::size_t i) {
    const data::TimeSlice& slice = sample[i];
    const auto folds = eval::make_folds(
        slice.station_ids, c.fold_count,
        derive_seed(c.seed, "folds", static_cast<std::uint64_t>(slice.time)));
    zero_scores[i] = eval::slice_quality(zero, slice, folds);
    scores[i] = eval::slice_quality(trainer, slice, folds);
  });
  const eval::QualityReport report = eval::aggregate(scores, zero_scores);

  nlohmann::json j;
  j["command"] = "evaluate";
  j["model"] = c.model;
  j["config"] = config_to_json(c);
  j["report"] = report_to_json(report);
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << "time,stations,q,q_zero\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::string time = data::format_time_iso8601(scores[i].time);
    rows.push_back({{"time", time},
                    {"stations", scores[i].stations},
                    {"q", scores[i].q},
                    {"q_zero", zero_scores[i].q}});
    csv << time << ',' << scores[i].stations << ',' << fmt(scores[i].q) << ','
        << fmt(zero_scores[i].q) << '\n';
  }
  j["slices"] = rows;
  const std::string stem = "evaluation_" + c.model;
  write_json_file(out_path(c, stem + ".json"), j);
  write_text_file(out_path(c, stem + "_slices.csv"), csv.str());
  std::cout << "evaluate: " << c.model << " E_tilde=" << fmt(report.e_tilde)
            << " +- " << fmt(report.ci_half_width / report.q_zero)
            << " (Q_tilde=" << fmt(report.q_tilde) << ", " << n
            << " slices) -> " << out_path(c, stem + ".json").string() << "\n";
}

void run_hypersearch(const RunConfig& c) {
  c.validate();
  if (c.lambda_grid.empty() || c.eta_grid.empty())
    throw ConfigError(
        "empty hyperparameter grid (need --lambda-grid and --eta-grid)");
  const data::Dataset ds = load_dataset(c);
  const Domain dom = resolve_domain(ds, c);
  const std::vector<data::TimeSlice> sample = sample_slices(ds, c);

  rff::RffOptions base = rff_options(c, dom);
  base.record_history = false;
  std::vector<eval::GridCandidate> candidates;
  std::vector<std::pair<double, double>> points;
  for (const double lambda : c.lambda_grid) {
    for (const double eta : c.eta_grid) {
      const std::size_t index = candidates.size();
      rff::RffOptions o = base;
      o.loss.lambda = lambda;
      o.loss.eta = eta;
      o.loss.validate();
      const std::uint64_t master = c.seed;
      eval::GridCandidate cand;
      cand.label = "lambda=" + fmt(lambda) + ",eta=" + fmt(eta);
      cand.trainer = [o, master, index](const data::TimeSlice& s) {
        rff::RffOptions opts = o;
        opts.seed = derive_seed(master, "hypersearch-model", index,
                                static_cast<std::uint64_t>(s.time));
        return std::make_unique<spectral::SpectralModel>(
            rff::train(s, opts).model);
      };
      candidates.push_back(std::move(cand));
      points.emplace_back(lambda, eta);
    }
  }
  const eval::GridResult result =
      eval::grid_search(candidates, sample, c.fold_count, c.seed, c.jobs);

  // var is the squared standard error of E_tilde with the reference score
  // treated as fixed: var(Q_tilde) / Q_zero^2.
  std::ostringstream csv;
  csv << "lambda,eta,E_tilde,var\n";
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i].report;
    const double var = r.var_q_tilde / (r.q_zero * r.q_zero);
    csv << fmt(points[i].first) << ',' << fmt(points[i].second) << ','
        << fmt(r.e_tilde) << ',' << fmt(var) << '\n';
    rows.push_back({{"lambda", points[i].first},
                    {"eta", points[i].second},
                    {"E_tilde", r.e_tilde},
                    {"var", var},
                    {"report", report_to_json(r)}});
  }
  const auto& best = result.rows[result.best_index].report;
  nlohmann::json j;
  j["command"] = "hypersearch";
  j["config"] = config_to_json(c);
  j["rows"] = rows;
  j["best"] = {{"lambda", points[result.best_index].first},
               {"eta", points[result.best_index].second},
               {"E_tilde", best.e_tilde}};
  write_text_file(out_path(c, "hypersearch.csv"), csv.str());
  write_json_file(out_path(c, "hypersearch_best.json"), j);
  std::cout << "hypersearch: " << result.rows.size() << " candidates, best"
            << " lambda=" << fmt(points[result.best_index].first)
            << " eta=" << fmt(points[result.best_index].second)
            << " E_tilde=" << fmt(best.e_tilde) << " -> "
            << out_path(c, "hypersearch.csv").string() << "\n";
}

namespace {

struct LoadedModel {
  std::unique_ptr<Interpolator> model;
  std::string kind;
  // Default reconstruction box (the model's natural domain).
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
};

LoadedModel load_model_file(const RunConfig& c) {
  const nlohmann::json j = read_json_file(c.model_file);
  LoadedModel out;
  try {
    out.kind = j.at("kind").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file " + c.model_file + " has no kind: " +
                    e.what());
  }
  if (out.kind == "rff" || out.kind == "fourier") {
    auto model = std::make_unique<spectral::SpectralModel>(
        spectral::SpectralModel::from_json(j.at("model")));
    out.xmin = model->origin().x();
    out.ymin = model->origin().y();
    out.xmax = out.xmin + model->tau().x();
    out.ymax = out.ymin + model->tau().y();
    out.model = std::move(model);
    return out;
  }
  if (out.kind == "truth") {
    const TruthSidecar sidecar = load_truth(c.model_file);
    auto it = sidecar.fields.begin();
    if (!c.time.empty()) {
      const std::int64_t t = data::parse_time_iso8601(c.time);
      it = sidecar.fields.find(t);
      if (it == sidecar.fields.end())
        throw DataError("truth sidecar has no field for " + c.time);
    }
    out.xmin = sidecar.origin.x();
    out.ymin = sidecar.origin.y();
    out.xmax = out.xmin + sidecar.tau.x();
    out.ymax = out.ymin + sidecar.tau.y();
    out.model = std::make_unique<TruthModel>(it->second);
    return out;
  }
  const bool baseline = out.kind == "nearest" || out.kind == "idw" ||
                        out.kind == "kriging" || out.kind == "forest";
  if (!baseline)
    throw DataError("model file " + c.model_file + " has unknown kind '" +
                    out.kind + "'");
  const data::TimeSlice slice = slice_from_json(j.at("slice"));
  out.xmin = out.xmax = slice.points.front().x;
  out.ymin = out.ymax = slice.points.front().y;
  for (const auto& p : slice.points) {
    out.xmin = std::min(out.xmin, p.x);
    out.xmax = std::max(out.xmax, p.x);
    out.ymin = std::min(out.ymin, p.y);
    out.ymax = std::max(out.ymax, p.y);
  }
  try {
    if (out.kind == "nearest") {
      out.model = baselines::fit_nearest(slice);
    } else if (out.kind == "idw") {
      out.model = baselines::fit_idw(slice, j.at("power").get<double>());
    } else if (out.kind == "kriging") {
      out.model = baselines::fit_kriging(slice);
    } else {
      baselines::ForestOptions o;
      o.tree_count = j.at("tree_count").get<int>();
      o.bootstrap = j.at("bootstrap").get<bool>();
      out.model =
          baselines::fit_forest(slice, o, j.at("seed").get<std::uint64_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file " + c.model_file +
                    " is missing hyperparameters: " + e.what());
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < n; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(n - 1));
  return out;
}

}  // namespace

void run_reconstruct(const RunConfig& c) {
  c.validate();
  LoadedModel loaded;
  if (!c.model_file.empty()) {
    loaded = load_model_file(c);
  } else {
    const data::Dataset ds = load_dataset(c);
    const Domain dom = resolve_domain(ds, c);
    const data::TimeSlice& slice = find_slice(ds, c);
    loaded.kind = c.model;
    loaded.model = make_trainer(c, dom)(slice);
    if (c.model == "rff" || c.model == "fourier" || c.model == "truth") {
      loaded.xmin = dom.origin.x();
      loaded.ymin = dom.origin.y();
      loaded.xmax = loaded.xmin + dom.tau.x();
      loaded.ymax = loaded.ymin + dom.tau.y();
    } else {
      loaded.xmin = loaded.xmax = slice.points.front().x;
      loaded.ymin = loaded.ymax = slice.points.front().y;
      for (const auto& p : slice.points) {
        loaded.xmin = std::min(loaded.xmin, p.x);
        loaded.xmax = std::max(loaded.xmax, p.x);
        loaded.ymin = std::min(loaded.ymin, p.y);
        loaded.ymax = std::max(loaded.ymax, p.y);
      }
    }
  }
  double x0 = std::isnan(c.xmin) ? loaded.xmin : c.xmin;
  double x1 = std::isnan(c.xmax) ? loaded.xmax : c.xmax;
  double y0 = std::isnan(c.ymin) ? loaded.ymin : c.ymin;
  double y1 = std::isnan(c.ymax) ? loaded.ymax : c.ymax;
  if (x1 < x0 || y1 < y0)
    throw ConfigError("reconstruction box is empty (max < min)");

  double hx = 0.0, hy = 0.0;
  if (c.divergence) {
    hx = 1e-4 * (x1 - x0);
    hy = 1e-4 * (y1 - y0);
    if (hx <= 0.0 || hy <= 0.0)
      throw ConfigError("divergence needs a box with positive extent");
    // Keep the difference stencil inside the model's valid domain.
    x0 += hx;
    x1 -= hx;
    y0 += hy;
    y1 -= hy;
  }
  const std::vector<double> xs = linspace(x0, x1, c.nx);
  const std::vector<double> ys = linspace(y0, y1, c.ny);
  std::ostringstream csv;
  csv << (c.divergence ? "x,y,u,v,div\n" : "x,y,u,v\n");
  for (const double y : ys) {
    for (const double x : xs) {
      const Vec2 v = loaded.model->predict(Point3{x, y, 0.0});
      csv << fmt(x) << ',' << fmt(y) << ',' << fmt(v.x()) << ','
          << fmt(v.y());
      if (c.divergence) {
        const Vec2 xp = loaded.model->predict(Point3{x + hx, y, 0.0});
        const Vec2 xm = loaded.model->predict(Point3{x - hx, y, 0.0});
        const Vec2 yp = loaded.model->predict(Point3{x, y + hy, 0.0});
        const Vec2 ym = loaded.model->predict(Point3{x, y - hy, 0.0});
        const double div = (xp.x() - xm.x()) / (2.0 * hx) +
                           (yp.y() - ym.y()) / (2.0 * hy);
        csv << ',' << fmt(div);
      }
      csv << '\n';
    }
  }
  write_text_file(out_path(c, "field.csv"), csv.str());
  std::cout << "reconstruct: " << loaded.kind << " on " << c.nx << "x" << c.ny
            << " grid -> " << out_path(c, "field.csv").string() << "\n";
}

void run_autocorr(const RunConfig& c) {
  c.validate();
  const data::Dataset ds = load_dataset(c);
  std::map<std::string, std::vector<Vec2>> series;
  for (const auto& slice : ds.slices)
    for (std::size_t i = 0; i < slice.size(); ++i)
      series[slice.station_ids[i]].push_back(slice.velocities[i]);

  std::ostringstream csv;
  csv << "station,component,lag,value\n";
  std::size_t emitted = 0;
  for (const auto& [id, values] : series) {
    if (values.size() < 2) {
      std::cerr << "warning: station " << id << " skipped ("
                << values.size() << " observation(s))\n";
      continue;
    }
    for (const int comp : {0, 1}) {
      std::vector<double> x;
      x.reserve(values.size());
      for (const auto& v : values) x.push_back(comp == 0 ? v.x() : v.y());
      const auto r = eval::sample_autocorrelation(
          x, static_cast<std::size_t>(c.max_lag));
      const char* name = comp == 0 ? "u" : "v";
      if (r.empty()) {
        std::cerr << "warning: station " << id << " component " << name
                  << ": autocorrelation undefined (constant series)\n";
        continue;
      }
      for (std::size_t lag = 0; lag < r.size(); ++lag) {
        csv << id << ',' << name << ',' << lag << ',' << fmt(r[lag]) << '\n';
        ++emitted;
      }
    }
  }
  write_text_file(out_path(c, "autocorr.csv"), csv.str());
  std::cout << "autocorr: " << emitted << " rows over " << series.size()
            << " stations -> " << out_path(c, "autocorr.csv").string()
            << "\n";
}

void run_oracle(const RunConfig& c) {
  c.validate();
  if (c.profile_path.empty())
    throw ConfigError("oracle requires a spectral profile (--profile)");
  const nlohmann::json in = read_json_file(c.profile_path);

  theory::SpectralProfile profile;
  theory::BoundParams params;
  std::vector<Vec2c> coeffs;
  try {
    for (const auto& m : in.at("support"))
      profile.support.push_back(
          LatticePoint{m.at(0).get<int>(), m.at(1).get<int>()});
    profile.norms = in.at("norms").get<std::vector<double>>();
    profile.e_f_sq = in.value("e_f_sq", 0.0);
    profile.noise_variance = in.value("noise_variance", 0.0);
    params.feature_count = in.at("feature_count").get<std::size_t>();
    params.lambda = in.value("lambda", 0.0);
    if (in.contains("c_bar")) {
      params.c_bar = in.at("c_bar").get<double>();
    } else if (in.contains("moment_bound")) {
      params.c_bar = theory::divergence_c_bar(in.at("moment_bound").get<double>());
    }
    if (in.contains("coeffs")) {
      for (const auto& row : in.at("coeffs"))
        coeffs.emplace_back(
            Complex(row.at(0).get<double>(), row.at(1).get<double>()),
            Complex(row.at(2).get<double>(), row.at(3).get<double>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed profile " + c.profile_path + ": " + e.what());
  }
  profile.validate();
  params.validate();

  const theory::DensityOnSupport optimal = theory::optimal_density(profile);
  theory::DensityOnSupport uniform;
  uniform.probabilities.assign(profile.support.size(),
                               1.0 / static_cast<double>(profile.support.size()));

  nlohmann::json j;
  j["command"] = "oracle";
  j["config"] = config_to_json(c);
  j["support_size"] = profile.support.size();
  j["optimal_density"] = optimal.probabilities;
  j["zero_norm_points"] = optimal.zero_norm_points;
  j["bound_optimal"] = theory::bound_value(profile, optimal, params);
  j["bound_uniform"] = theory::bound_value(profile, uniform, params);
  if (optimal.zero_norm_points.empty()) {
    j["objective_optimal"] =
        theory::bound_objective(profile.norms, optimal.probabilities);
  } else {
    j["objective_optimal"] = nullptr;
  }
  j["objective_uniform"] =
      theory::bound_objective(profile.norms, uniform.probabilities);

  if (c.grid_resolution > 0.0) {
    const theory::DensityOnSupport brute =
        theory::brute_force_density_argmin(profile, c.grid_resolution);
    double linf = 0.0;
    for (std::size_t i = 0; i < brute.probabilities.size(); ++i)
      linf = std::max(linf, std::abs(brute.probabilities[i] -
                                     optimal.probabilities[i]));
    j["brute_force"] = {{"grid_resolution", c.grid_resolution},
                        {"probabilities", brute.probabilities},
                        {"max_deviation_from_optimal", linf}};
  }

  if (c.check_draws > 0) {
    if (coeffs.size() != profile.support.size())
      throw ConfigError(
          "the estimator check needs a 'coeffs' entry matching the support");
    theory::BandlimitedField field;
    field.support = profile.support;
    field.coeffs = coeffs;
    field.validate();
    auto rng = make_rng(derive_seed(c.seed, "oracle-points"));
    std::uniform_real_distribution<double> unif(0.0, 2.0 * 3.14159265358979323846);
    std::vector<Vec2> points;
    for (int i = 0; i < c.check_points; ++i) {
      const double x = unif(rng);
      const double y = unif(rng);
      points.emplace_back(x, y);
    }
    const theory::UnbiasednessReport report = theory::unbiasedness_check(
        field, optimal, params.feature_count,
        static_cast<std::size_t>(c.check_draws), points,
        derive_seed(c.seed, "oracle-draws"));
    j["estimator_check"] = {
        {"draws", report.draws},
        {"max_standardized_deviation", report.max_standardized_deviation},
        {"per_point", report.per_point}};
  }

  write_json_file(out_path(c, "oracle.json"), j);
  std::cout << "oracle: support " << profile.support.size()
            << ", bound(optimal)=" << fmt(j["bound_optimal"].get<double>())
            << ", bound(uniform)=" << fmt(j["bound_uniform"].get<double>())
            << " -> " << out_path(c, "oracle.json").string() << "\n";
}

}  // namespace windfield::pipeline
