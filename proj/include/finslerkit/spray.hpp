#pragma once

// The (α,β)-metric F = αφ(β/α): norm, fundamental tensor and spray
// coefficients by three routes (quarter-Hessian definition, the general
// closed form, and the per-family specializations).

#include "finslerkit/dual.hpp"
#include "finslerkit/errors.hpp"
#include "finslerkit/fields.hpp"
#include "finslerkit/phi.hpp"
#include "finslerkit/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <span>
#include <sstream>
#include <vector>

namespace finslerkit {

struct AlphaBetaMetric {
  MetricField metric;
  OneFormField oneform;
  PhiFamily family;

  std::size_t dimension() const { return metric.dimension(); }
};

/// Evaluations need α ≥ kAlphaFloor·|y|.
inline constexpr double kAlphaFloor = 1e-8;

namespace detail {

template <class T>
double euclid_norm(std::span<const T> y) {
  double sq = 0.0;
  for (const auto& c : y) sq += primal(c) * primal(c);
  return std::sqrt(sq);
}

template <class T>
void check_alpha(const T& alpha, std::span<const T> y) {
  if (!(primal(alpha) >= kAlphaFloor * euclid_norm(y)) || !(primal(alpha) > 0.0)) {
    std::ostringstream msg;
    msg << "α(y) = " << primal(alpha) << " is below the admissible floor";
    throw DegenerateDirectionError(msg.str());
  }
}

}  // namespace detail

/// F² on (possibly jet-valued) x and y. Used by the definitional spray.
template <class T>
T finsler_sq(const AlphaBetaMetric& ab, std::span<const T> x, std::span<const T> y) {
  using std::sqrt;
  const std::size_t n = ab.dimension();
  const auto a = ab.metric.eval<T>(x);
  const auto b = ab.oneform.eval<T>(x);
  T alpha_sq(0.0), beta(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    T row(0.0);
    for (std::size_t j = 0; j < n; ++j) row = row + a[i * n + j] * y[j];
    alpha_sq = alpha_sq + row * y[i];
    beta = beta + b[i] * y[i];
  }
  const T alpha = sqrt(alpha_sq);
  detail::check_alpha(alpha, y);
  const T phi = phi_value(ab.family, beta / alpha);
  return alpha_sq * phi * phi;
}

double finsler_norm(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y);

/// s = β/α at (p, y).
double s_value(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y);

/// True when α clears the floor and s lies in the family's domain with at
/// least `margin` to spare from the domain edge (QabMinus s > 1 + margin,
/// Kropina s > margin, QabPlus 1 + s > margin).
bool admissible(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y, double margin = 0.0);

struct FundamentalTensor {
  Eigen::MatrixXd g;
  bool positive_definite = false;
};

/// g_ij = ½ ∂²F²/∂y^i∂y^j. A non-positive-definite g is flagged, not thrown.
FundamentalTensor fundamental_tensor(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y);

/// G^i = ¼ g^{il}{∂²F²/∂x^k∂y^l y^k − ∂F²/∂x^l}, every derivative by jets.
SprayVector spray_oracle(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y);

/// G^i = G^i_α + αQ s^i_0 + (r_00 − 2Qα s_0)(Θ y^i/α + Ψ b^i) on jet-valued y.
template <class T>
std::vector<T> closed_spray(const PointGeometry& g, const PhiFamily& family, std::span<const T> y) {
  const std::size_t n = g.n;
  const auto c = contract<T>(g, y);
  detail::check_alpha(c.alpha, y);
  const auto f = geometry_factors(family, c.beta / c.alpha, g.bsq);
  auto out = riemann_spray_at<T>(g.gamma, y);
  const T aQ = c.alpha * f.Q;
  const T bracket = c.r00 - 2.0 * aQ * c.s0;
  const T ycoef = bracket * f.Theta / c.alpha;
  const T bcoef = bracket * f.Psi;
  for (std::size_t i = 0; i < n; ++i)
    out[i] = out[i] + aQ * c.s_up0[i] + ycoef * y[i] + bcoef * g.b_up[i];
  return out;
}

SprayVector spray_closed(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y);
SprayVector spray_closed(const PointGeometry& g, const PhiFamily& family, const TangentVector& y);

/// max |s_ij| at a point.
double closedness_residual(const PointGeometry& g);
/// max |s_ij − (b_i s_j − b_j s_i)/b²| at a point.
double kropina_douglas_residual(const PointGeometry& g);

/// The specialized sprays: QabPlus and QabMinus assume s_ij = 0, Kropina
/// assumes s_ij = (b_i s_j − b_j s_i)/b². Throws PreconditionError when the
/// hypothesis residual at p exceeds `tolerance`.
SprayVector spray_family(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y,
                         double tolerance = 1e-8);

/// Uniform direction on the unit sphere, redrawn until admissible. Throws
/// ConfigError after `max_redraws` failures.
TangentVector sample_direction(const AlphaBetaMetric& ab, const Point& p, std::mt19937_64& rng,
                               double margin = 1e-2, std::size_t max_redraws = 10000);

}  // namespace finslerkit
