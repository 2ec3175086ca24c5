#pragma once

// Polynomial tensor fields on R^n and the Riemannian-side quantities:
// Christoffel symbols, the Riemannian spray, and the covariant-derivative
// split b_{i|j} = r_ij + s_ij of a 1-form.

#include "finslerkit/poly_field.hpp"
#include "finslerkit/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace finslerkit {

/// Symmetric matrix of polynomial components a_ij.
class MetricField {
 public:
  /// Throws std::invalid_argument unless the table is n×n, every component
  /// lives on R^n, and a_ij == a_ji as polynomials.
  MetricField() = default;
  explicit MetricField(std::vector<std::vector<PolyField>> components);

  static MetricField euclidean(std::size_t n);

  std::size_t dimension() const { return n_; }
  const PolyField& component(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  Eigen::MatrixXd at(const Point& p) const;
  /// ∂_k a_ij at p.
  Eigen::MatrixXd derivative_at(std::size_t k, const Point& p) const;

  /// Row-major components evaluated on (possibly jet-valued) coordinates.
  template <class T>
  std::vector<T> eval(std::span<const T> x) const {
    std::vector<T> out(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) out[i * n_ + j] = out[j * n_ + i] = a_[i * n_ + j].eval(x);
    return out;
  }

  /// Scales every component by a polynomial factor (conformal change).
  MetricField conformal(const PolyField& factor) const;

 private:
  std::size_t n_ = 0;
  std::vector<PolyField> a_;
  std::vector<PolyField> da_;  // da_[k*n*n + i*n + j] = ∂_k a_ij
};

/// Polynomial 1-form β = b_i(x) y^i.
class OneFormField {
 public:
  OneFormField() = default;
  explicit OneFormField(std::vector<PolyField> components);

  std::size_t dimension() const { return b_.size(); }
  const PolyField& component(std::size_t i) const { return b_[i]; }
  bool is_identically_zero() const;

  Eigen::VectorXd at(const Point& p) const;
  /// Matrix J with J(i, j) = ∂_j b_i at p.
  Eigen::MatrixXd jacobian_at(const Point& p) const;

  template <class T>
  std::vector<T> eval(std::span<const T> x) const {
    std::vector<T> out;
    out.reserve(b_.size());
    for (const auto& c : b_) out.push_back(c.eval(x));
    return out;
  }

  OneFormField scaled(const PolyField& factor) const;

 private:
  std::vector<PolyField> b_;
  std::vector<PolyField> db_;  // db_[i*n + j] = ∂_j b_i
};

/// Rank-3 array Γ^i_{jk}.
class Christoffel {
 public:
  explicit Christoffel(std::size_t n = 0) : n_(n), data_(n * n * n, 0.0) {}
  std::size_t dimension() const { return n_; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * n_ + j) * n_ + k]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * n_ + j) * n_ + k];
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

/// Relative pivot floor below which a metric matrix counts as degenerate.
inline constexpr double kDegeneratePivot = 1e-10;

/// Inverse of a symmetric positive-definite matrix. Throws
/// DegenerateMetricError when the smallest LDLᵀ pivot is below
/// kDegeneratePivot × the largest diagonal entry (or negative).
Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& a);

/// True iff every pivot of the factorization clears the degeneracy floor.
bool is_positive_definite(const Eigen::MatrixXd& a);

/// Throws DegenerateMetricError naming the first sample where the metric is
/// not positive definite.
void check_positive_definite(const MetricField& metric, std::span<const Point> samples);

Christoffel christoffel(const MetricField& metric, const Point& p);

/// G^i_α = ½ Γ^i_{jk} y^j y^k on (possibly jet-valued) y.
template <class T>
std::vector<T> riemann_spray_at(const Christoffel& gamma, std::span<const T> y) {
  const std::size_t n = gamma.dimension();
  std::vector<T> g(n, T(0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T row(0.0);
      for (std::size_t k = 0; k < n; ++k) row = row + gamma(i, j, k) * y[k];
      g[i] = g[i] + 0.5 * row * y[j];
    }
  return g;
}

SprayVector riemann_spray(const MetricField& metric, const Point& p, const TangentVector& y);

/// Everything at a point that does not depend on the direction y.
struct PointGeometry {
  std::size_t n = 0;
  Eigen::MatrixXd a, a_inv;
  Christoffel gamma;
  Eigen::VectorXd b, b_up;  // b_i, b^i = a^{ij} b_j
  double bsq = 0.0;         // b² = b_i b^i
  Eigen::MatrixXd nabla_b;  // b_{i|j}
  Eigen::MatrixXd r, s;
  Eigen::VectorXd r_vec, s_vec;  // r_j = b^i r_ij, s_j = b^i s_ij
  Eigen::VectorXd s_up;          // s^i = a^{ik} s_k
};

PointGeometry point_geometry(const MetricField& metric, const OneFormField& oneform, const Point& p);

/// Direction-dependent contractions of PointGeometry with y.
template <class T>
struct Contractions {
  T alpha, beta;
  T r00, r0, s0;
  std::vector<T> ri0, si0, s_up0;
};

template <class T>
Contractions<T> contract(const PointGeometry& g, std::span<const T> y) {
  using std::sqrt;
  const std::size_t n = g.n;
  Contractions<T> c{T(0.0), T(0.0), T(0.0), T(0.0), T(0.0),
                    std::vector<T>(n, T(0.0)), std::vector<T>(n, T(0.0)), std::vector<T>(n, T(0.0))};
  T alpha_sq(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    T ay(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      ay = ay + g.a(i, j) * y[j];
      c.ri0[i] = c.ri0[i] + g.r(i, j) * y[j];
      c.si0[i] = c.si0[i] + g.s(i, j) * y[j];
    }
    alpha_sq = alpha_sq + ay * y[i];
    c.beta = c.beta + g.b[i] * y[i];
    c.r0 = c.r0 + g.r_vec[i] * y[i];
    c.s0 = c.s0 + g.s_vec[i] * y[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    c.r00 = c.r00 + c.ri0[i] * y[i];
    for (std::size_t k = 0; k < n; ++k) c.s_up0[i] = c.s_up0[i] + g.a_inv(i, k) * c.si0[k];
  }
  c.alpha = sqrt(alpha_sq);
  return c;
}

/// Pointwise covariant-derivative data of β together with every contraction
/// with y used by the spray formulas.
struct BetaData {
  Eigen::MatrixXd nabla_b, r, s;
  double r00 = 0.0, s0 = 0.0, r0 = 0.0;
  Eigen::VectorXd si0, ri0, s_up0, s_up;
  Eigen::VectorXd r_vec, s_vec, b_up;
  double bsq = 0.0;
  double beta_val = 0.0, alpha_val = 0.0;
};

BetaData beta_data(const PointGeometry& g, const TangentVector& y);
BetaData beta_data(const MetricField& metric, const OneFormField& oneform, const Point& p,
                   const TangentVector& y);

}  // namespace finslerkit
