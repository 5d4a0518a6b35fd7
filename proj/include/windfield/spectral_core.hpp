#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "windfield/data_model.hpp"
#include "windfield/types.hpp"

namespace windfield::spectral {

using FrequencyLattice = std::vector<LatticePoint>;
using Coefficients = std::vector<Vec2c>;  // one complex pair per frequency

/// Angular frequency of a lattice point in unit-square coordinates.
inline Vec2 omega(const LatticePoint& m) {
  constexpr double kPi = 3.14159265358979323846;
  return Vec2(kPi * m.m1, kPi * m.m2);
}

/// Smoothness weight s(m) = gs^2 |w|^4 + gs |w|^2 + 1 with |w|^2 the squared
/// norm of omega(m). Equals 1 at m = 0 and grows with frequency, so the
/// weighted coefficient norm controls second derivatives.
double sobolev_factor(const LatticePoint& m, double gamma_s);

struct LossParams {
  double lambda = 0.01;   // coefficient shrinkage weight
  double eta = 0.001;     // divergence penalty weight
  double gamma_s = 1.0;   // derivative scale inside the smoothness weight

  void validate() const;
};

/// N x K matrix with entries exp(i pi (m1 x + m2 y)) for unit-square points.
Eigen::MatrixXcd design_matrix(const std::vector<Vec2>& unit_points,
                               const FrequencyLattice& lattice);

/// Weighted squared coefficient norm sum_k s(m_k) |beta_k|^2.
double sobolev_norm(const FrequencyLattice& lattice, const Coefficients& beta,
                    double gamma_s);

/// |omega . beta_k|^2 for one frequency: the contribution of that term to
/// the mean squared divergence of the interpolant.
double divergence_quadform(const LatticePoint& m, const Vec2c& beta_k);

/// sum_k divergence_quadform(m_k, beta_k).
double divergence_penalty(const FrequencyLattice& lattice,
                          const Coefficients& beta);

struct LossTerms {
  double data = 0.0;        // (1/N) sum_n |pred(x_n) - u_n|^2, complex modulus
  double sobolev = 0.0;     // weighted coefficient norm (before lambda)
  double divergence = 0.0;  // divergence penalty (before eta)

  double total(const LossParams& params) const {
    return data + params.lambda * sobolev + params.eta * divergence;
  }
};

LossTerms loss_terms(const FrequencyLattice& lattice, const Coefficients& beta,
                     const std::vector<Vec2>& unit_points,
                     const std::vector<Vec2>& velocities,
                     const LossParams& params);
double empirical_loss(const FrequencyLattice& lattice,
                      const Coefficients& beta,
                      const std::vector<Vec2>& unit_points,
                      const std::vector<Vec2>& velocities,
                      const LossParams& params);

/// Minimizes the empirical loss over the coefficients for a fixed frequency
/// set. The stationarity conditions couple the two velocity components
/// through the divergence penalty, giving a Hermitian 2K x 2K system
///   [ A + eta diag(w1^2)    eta diag(w1 w2)  ] [beta1]   [S* U1 / N]
///   [ eta diag(w1 w2)       A + eta diag(w2^2)] [beta2] = [S* U2 / N]
/// with A = S*S/N + lambda diag(s_k). For lambda > 0 the system is positive
/// definite and solved by a Cholesky-type factorization; for lambda = 0 the
/// minimum-norm solution is taken via an eigendecomposition pseudo-inverse
/// with relative cutoff 1e-12.
Coefficients solve_coefficients(const std::vector<Vec2>& unit_points,
                                const std::vector<Vec2>& velocities,
                                const FrequencyLattice& lattice,
                                const LossParams& params);

/// A fitted spectral interpolant. Predictions take the real part of the
/// complex exponential sum at the rescaled position.
class SpectralModel : public Interpolator {
 public:
  SpectralModel() = default;
  SpectralModel(FrequencyLattice lattice, Coefficients beta, Vec2 tau,
                Vec2 origin);

  Vec2 predict(const Point3& p) const override;
  Vec2 eval_unit(const Vec2& unit) const;
  Vec2c eval_complex_unit(const Vec2& unit) const;

  const FrequencyLattice& lattice() const { return lattice_; }
  const Coefficients& beta() const { return beta_; }
  const Vec2& tau() const { return tau_; }
  const Vec2& origin() const { return origin_; }

  nlohmann::json to_json() const;
  static SpectralModel from_json(const nlohmann::json& j);

 private:
  FrequencyLattice lattice_;
  Coefficients beta_;
  Vec2 tau_ = Vec2(1.0, 1.0);
  Vec2 origin_ = Vec2(0.0, 0.0);
};

/// Rescales slice positions to the unit square and solves for the
/// coefficients of the given frequency set.
SpectralModel fit_spectral_model(const data::TimeSlice& slice,
                                 const FrequencyLattice& lattice,
                                 const LossParams& params, const Vec2& tau,
                                 const Vec2& origin);

/// Unit-square positions of a slice under (tau, origin).
std::vector<Vec2> unit_positions(const data::TimeSlice& slice, const Vec2& tau,
                                 const Vec2& origin);

}  // namespace windfield::spectral
