#include "windfield/spectral_core.hpp"

#include <cmath>

#include "windfield/errors.hpp"

namespace windfield::spectral {
namespace {

void check_inputs(const std::vector<Vec2>& unit_points,
                  const std::vector<Vec2>& velocities,
                  const FrequencyLattice& lattice) {
  if (unit_points.empty()) {
    throw DataError("spectral solve needs at least one observation");
  }
  if (unit_points.size() != velocities.size()) {
    throw DataError("positions and velocities differ in length");
  }
  if (lattice.empty()) {
    throw ConfigError("frequency set is empty");
  }
  // Duplicate lattice points are allowed: adaptive chains start with every
  // frequency at the origin and proposals may collide. The shrinkage term
  // keeps the system positive definite, and the pseudo-inverse covers the
  // unpenalized case.
  for (const auto& p : unit_points) {
    if (!p.allFinite()) throw DataError("non-finite position");
  }
  for (const auto& v : velocities) {
    if (!v.allFinite()) throw DataError("non-finite velocity");
  }
}

}  // namespace

double sobolev_factor(const LatticePoint& m, double gamma_s) {
  constexpr double kPi2 = 9.869604401089358;  // pi^2
  const double w2 = kPi2 * (static_cast<double>(m.m1) * m.m1 +
                            static_cast<double>(m.m2) * m.m2);
  return gamma_s * gamma_s * w2 * w2 + gamma_s * w2 + 1.0;
}

void LossParams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda) || !(eta >= 0.0) ||
      !std::isfinite(eta) || !(gamma_s >= 0.0) || !std::isfinite(gamma_s)) {
    throw ConfigError("loss weights must be finite and non-negative");
  }
}

Eigen::MatrixXcd design_matrix(const std::vector<Vec2>& unit_points,
                               const FrequencyLattice& lattice) {
  constexpr double kPi = 3.14159265358979323846;
  Eigen::MatrixXcd S(unit_points.size(), lattice.size());
  for (std::size_t n = 0; n < unit_points.size(); ++n) {
    for (std::size_t k = 0; k < lattice.size(); ++k) {
      const double phase = kPi * (lattice[k].m1 * unit_points[n].x() +
                                  lattice[k].m2 * unit_points[n].y());
      S(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) =
          std::polar(1.0, phase);
    }
  }
  return S;
}

double sobolev_norm(const FrequencyLattice& lattice, const Coefficients& beta,
                    double gamma_s) {
  if (lattice.size() != beta.size()) {
    throw ConfigError("coefficient count does not match lattice");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    sum += sobolev_factor(lattice[k], gamma_s) * beta[k].squaredNorm();
  }
  return sum;
}

double divergence_quadform(const LatticePoint& m, const Vec2c& beta_k) {
  const Vec2 w = omega(m);
  return std::norm(w.x() * beta_k.x() + w.y() * beta_k.y());
}

double divergence_penalty(const FrequencyLattice& lattice,
                          const Coefficients& beta) {
  if (lattice.size() != beta.size()) {
    throw ConfigError("coefficient count does not match lattice");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    sum += divergence_quadform(lattice[k], beta[k]);
  }
  return sum;
}

LossTerms loss_terms(const FrequencyLattice& lattice, const Coefficients& beta,
                     const std::vector<Vec2>& unit_points,
                     const std::vector<Vec2>& velocities,
                     const LossParams& params) {
  params.validate();
  check_inputs(unit_points, velocities, lattice);
  if (lattice.size() != beta.size()) {
    throw ConfigError("coefficient count does not match lattice");
  }
  const auto N = static_cast<Eigen::Index>(unit_points.size());
  const auto K = static_cast<Eigen::Index>(lattice.size());
  const Eigen::MatrixXcd S = design_matrix(unit_points, lattice);
  Eigen::VectorXcd b1(K), b2(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    b1(k) = beta[static_cast<std::size_t>(k)].x();
    b2(k) = beta[static_cast<std::size_t>(k)].y();
  }
  Eigen::VectorXcd r1 = S * b1;
  Eigen::VectorXcd r2 = S * b2;
  for (Eigen::Index n = 0; n < N; ++n) {
    r1(n) -= velocities[static_cast<std::size_t>(n)].x();
    r2(n) -= velocities[static_cast<std::size_t>(n)].y();
  }
  LossTerms terms;
  terms.data = (r1.squaredNorm() + r2.squaredNorm()) / static_cast<double>(N);
  terms.sobolev = sobolev_norm(lattice, beta, params.gamma_s);
  terms.divergence = divergence_penalty(lattice, beta);
  return terms;
}

double empirical_loss(const FrequencyLattice& lattice,
                      const Coefficients& beta,
                      const std::vector<Vec2>& unit_points,
                      const std::vector<Vec2>& velocities,
                      const LossParams& params) {
  return loss_terms(lattice, beta, unit_points, velocities, params)
      .total(params);
}

Coefficients solve_coefficients(const std::vector<Vec2>& unit_points,
                                const std::vector<Vec2>& velocities,
                                const FrequencyLattice& lattice,
                                const LossParams& params) {
  params.validate();
  check_inputs(unit_points, velocities, lattice);
  const auto N = static_cast<Eigen::Index>(unit_points.size());
  const auto K = static_cast<Eigen::Index>(lattice.size());

  const Eigen::MatrixXcd S = design_matrix(unit_points, lattice);
  Eigen::MatrixXcd A = (S.adjoint() * S) / static_cast<double>(N);
  Eigen::VectorXd w1(K), w2(K), s(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Vec2 w = omega(lattice[static_cast<std::size_t>(k)]);
    w1(k) = w.x();
    w2(k) = w.y();
    s(k) = sobolev_factor(lattice[static_cast<std::size_t>(k)], params.gamma_s);
  }
  A.diagonal() += (params.lambda * s).cast<Complex>();

  Eigen::MatrixXcd M(2 * K, 2 * K);
  M.topLeftCorner(K, K) = A;
  M.bottomRightCorner(K, K) = A;
  M.topRightCorner(K, K).setZero();
  M.bottomLeftCorner(K, K).setZero();
  M.topLeftCorner(K, K).diagonal() +=
      (params.eta * w1.array().square()).matrix().cast<Complex>();
  M.bottomRightCorner(K, K).diagonal() +=
      (params.eta * w2.array().square()).matrix().cast<Complex>();
  M.topRightCorner(K, K).diagonal() +=
      (params.eta * w1.array() * w2.array()).matrix().cast<Complex>();
  M.bottomLeftCorner(K, K).diagonal() = M.topRightCorner(K, K).diagonal();

  Eigen::VectorXcd U1(N), U2(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    U1(n) = velocities[static_cast<std::size_t>(n)].x();
    U2(n) = velocities[static_cast<std::size_t>(n)].y();
  }
  Eigen::VectorXcd rhs(2 * K);
  rhs.head(K) = S.adjoint() * U1 / static_cast<double>(N);
  rhs.tail(K) = S.adjoint() * U2 / static_cast<double>(N);

  Eigen::VectorXcd x(2 * K);
  if (params.lambda > 0.0) {
    // Strictly positive definite: every eigenvalue is at least lambda.
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(M);
    if (ldlt.info() != Eigen::Success) {
      throw NumericError("coefficient system factorization failed");
    }
    x = ldlt.solve(rhs);
  } else {
    // Possibly singular: minimum-norm solution via the spectral
    // pseudo-inverse of the Hermitian system.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M);
    if (eig.info() != Eigen::Success) {
      throw NumericError("coefficient system eigendecomposition failed");
    }
    const Eigen::VectorXd& evals = eig.eigenvalues();
    const double cutoff = 1e-12 * evals.cwiseAbs().maxCoeff();
    Eigen::VectorXcd projected = eig.eigenvectors().adjoint() * rhs;
    for (Eigen::Index i = 0; i < projected.size(); ++i) {
      projected(i) =
          std::abs(evals(i)) > cutoff ? projected(i) / evals(i) : Complex(0.0);
    }
    x = eig.eigenvectors() * projected;
  }
  if (!x.allFinite()) {
    throw NumericError("coefficient solve produced non-finite values");
  }

  Coefficients beta(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k) {
    beta[static_cast<std::size_t>(k)] = Vec2c(x(k), x(K + k));
  }
  return beta;
}

SpectralModel::SpectralModel(FrequencyLattice lattice, Coefficients beta,
                             Vec2 tau, Vec2 origin)
    : lattice_(std::move(lattice)),
      beta_(std::move(beta)),
      tau_(tau),
      origin_(origin) {
  if (lattice_.size() != beta_.size()) {
    throw ConfigError("coefficient count does not match lattice");
  }
  if (!(tau_.x() > 0.0) || !(tau_.y() > 0.0) || !tau_.allFinite() ||
      !origin_.allFinite()) {
    throw ConfigError("spectral model needs positive finite tau and finite "
                      "origin");
  }
}

Vec2c SpectralModel::eval_complex_unit(const Vec2& unit) const {
  constexpr double kPi = 3.14159265358979323846;
  Vec2c sum = Vec2c::Zero();
  for (std::size_t k = 0; k < lattice_.size(); ++k) {
    const double phase =
        kPi * (lattice_[k].m1 * unit.x() + lattice_[k].m2 * unit.y());
    sum += beta_[k] * std::polar(1.0, phase);
  }
  return sum;
}

Vec2 SpectralModel::eval_unit(const Vec2& unit) const {
  const Vec2c value = eval_complex_unit(unit);
  return Vec2(value.x().real(), value.y().real());
}

Vec2 SpectralModel::predict(const Point3& p) const {
  return eval_unit(data::rescale_to_unit(Vec2(p.x, p.y), tau_, origin_));
}

nlohmann::json SpectralModel::to_json() const {
  nlohmann::json j;
  j["tau"] = {tau_.x(), tau_.y()};
  j["origin"] = {origin_.x(), origin_.y()};
  auto lattice = nlohmann::json::array();
  auto beta = nlohmann::json::array();
  for (std::size_t k = 0; k < lattice_.size(); ++k) {
    lattice.push_back({lattice_[k].m1, lattice_[k].m2});
    beta.push_back({beta_[k].x().real(), beta_[k].x().imag(),
                    beta_[k].y().real(), beta_[k].y().imag()});
  }
  j["lattice"] = std::move(lattice);
  j["beta"] = std::move(beta);
  return j;
}

SpectralModel SpectralModel::from_json(const nlohmann::json& j) {
  try {
    const auto& jt = j.at("tau");
    const auto& jo = j.at("origin");
    const auto& jl = j.at("lattice");
    const auto& jb = j.at("beta");
    if (jl.size() != jb.size()) {
      throw DataError("model file: lattice and beta sizes differ");
    }
    FrequencyLattice lattice;
    Coefficients beta;
    lattice.reserve(jl.size());
    beta.reserve(jb.size());
    for (std::size_t k = 0; k < jl.size(); ++k) {
      lattice.push_back(
          LatticePoint{jl[k].at(0).get<int>(), jl[k].at(1).get<int>()});
      beta.push_back(
          Vec2c(Complex(jb[k].at(0).get<double>(), jb[k].at(1).get<double>()),
                Complex(jb[k].at(2).get<double>(), jb[k].at(3).get<double>())));
    }
    return SpectralModel(
        std::move(lattice), std::move(beta),
        Vec2(jt.at(0).get<double>(), jt.at(1).get<double>()),
        Vec2(jo.at(0).get<double>(), jo.at(1).get<double>()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed spectral model JSON: ") + e.what());
  }
}

std::vector<Vec2> unit_positions(const data::TimeSlice& slice, const Vec2& tau,
                                 const Vec2& origin) {
  std::vector<Vec2> unit;
  unit.reserve(slice.size());
  for (const auto& p : slice.points) {
    unit.push_back(data::rescale_to_unit(Vec2(p.x, p.y), tau, origin));
  }
  return unit;
}

SpectralModel fit_spectral_model(const data::TimeSlice& slice,
                                 const FrequencyLattice& lattice,
                                 const LossParams& params, const Vec2& tau,
                                 const Vec2& origin) {
  const auto unit = unit_positions(slice, tau, origin);
  auto beta = solve_coefficients(unit, slice.velocities, lattice, params);
  return SpectralModel(lattice, std::move(beta), tau, origin);
}

}  // namespace windfield::spectral
