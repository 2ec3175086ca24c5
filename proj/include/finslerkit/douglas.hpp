#pragma once

// Douglas tensor D^i_{jkl} = ∂³_{jkl}(G^i − λ (∂_m G^m) y^i), λ = 1/(n+1),
// the (α,β) source terms T^i and T^m_{y^m}, per-family Douglas certificates,
// and the shared-Douglas residual between two (α,β)-metrics.

#include "finslerkit/dual.hpp"
#include "finslerkit/fields.hpp"
#include "finslerkit/phi.hpp"
#include "finslerkit/spray.hpp"
#include "finslerkit/types.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace finslerkit {

class DouglasTensor {
 public:
  explicit DouglasTensor(std::size_t n = 0) : n_(n), data_(n * n * n * n, 0.0) {}
  std::size_t dimension() const { return n_; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return data_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  double max_abs() const;
  /// max |D − other| entrywise.
  double max_diff(const DouglasTensor& other) const;
  /// Largest deviation from total symmetry in (j,k,l).
  double symmetry_defect() const;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

inline double douglas_lambda(std::size_t n) { return 1.0 / static_cast<double>(n + 1); }

namespace detail {

inline std::vector<double> basis(std::size_t n, std::size_t k) {
  std::vector<double> e(n, 0.0);
  e[k] = 1.0;
  return e;
}

/// Fills every permutation of (j,k,l) with the same value.
inline void set_symmetric(DouglasTensor& d, std::size_t i, std::size_t j, std::size_t k, std::size_t l,
                          double v) {
  d(i, j, k, l) = d(i, j, l, k) = d(i, k, j, l) = d(i, k, l, j) = d(i, l, j, k) = d(i, l, k, j) = v;
}

}  // namespace detail

/// Douglas tensor of any spray evaluator callable on std::span<const Jet4>
/// and returning std::vector<Jet4>. Level seeds: e_j, e_k, e_l, e_m.
template <class Spray>
DouglasTensor douglas_tensor(Spray&& spray, const TangentVector& y) {
  const std::size_t n = y.dim();
  const double lambda = douglas_lambda(n);
  const std::span<const double> base(y.y.data(), n);
  DouglasTensor out(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) {
        std::vector<double> third(n, 0.0);
        double div3 = 0.0, div_jk = 0.0, div_jl = 0.0, div_kl = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
          const std::array<std::vector<double>, 4> dirs{detail::basis(n, j), detail::basis(n, k),
                                                        detail::basis(n, l), detail::basis(n, m)};
          const auto yj = seeded_vector<Jet4>(base, dirs);
          const std::vector<Jet4> g = spray(std::span<const Jet4>(yj));
          if (m == 0)
            for (std::size_t i = 0; i < n; ++i) third[i] = coefficient(g[i], 0b0111);
          div3 += coefficient(g[m], 0b1111);
          div_jk += coefficient(g[m], 0b1011);
          div_jl += coefficient(g[m], 0b1101);
          div_kl += coefficient(g[m], 0b1110);
        }
        for (std::size_t i = 0; i < n; ++i) {
          double v = third[i] - lambda * div3 * y.y[i];
          if (i == l) v -= lambda * div_jk;
          if (i == k) v -= lambda * div_jl;
          if (i == j) v -= lambda * div_kl;
          detail::set_symmetric(out, i, j, k, l, v);
        }
      }
  return out;
}

/// Douglas tensor of the closed-form spray of an (α,β)-metric at (p, y).
DouglasTensor douglas_tensor(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y);

struct SourceTerms {
  std::vector<double> T;
  double T_div = 0.0;
  double lambda = 0.0;
};

/// T^i = αQ s^i_0 + Ψ(r_00 − 2αQ s_0) b^i.
template <class T>
std::vector<T> source_T(const PointGeometry& g, const PhiFamily& family, std::span<const T> y) {
  const auto c = contract<T>(g, y);
  detail::check_alpha(c.alpha, y);
  const auto f = geometry_factors(family, c.beta / c.alpha, g.bsq);
  const T aQ = c.alpha * f.Q;
  const T bcoef = f.Psi * (c.r00 - 2.0 * aQ * c.s0);
  std::vector<T> out(g.n);
  for (std::size_t i = 0; i < g.n; ++i) out[i] = aQ * c.s_up0[i] + bcoef * g.b_up[i];
  return out;
}

/// T^m_{y^m} = Q's_0 + Ψ'α⁻¹(b² − s²)(r_00 − 2αQs_0) + 2Ψ[r_0 − Q'(b² − s²)s_0 − Qs s_0].
template <class T>
T source_div(const PointGeometry& g, const PhiFamily& family, std::span<const T> y) {
  const auto c = contract<T>(g, y);
  detail::check_alpha(c.alpha, y);
  const T s = c.beta / c.alpha;
  const auto f = geometry_factors(family, s, g.bsq);
  const T gap = g.bsq - s * s;
  const T bracket = c.r00 - 2.0 * c.alpha * f.Q * c.s0;
  return f.dQ * c.s0 + f.dPsi / c.alpha * gap * bracket +
         2.0 * f.Psi * (c.r0 - f.dQ * gap * c.s0 - f.Q * s * c.s0);
}

SourceTerms source_terms(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y);

enum class DouglasVerdict { Douglas, NotDouglas };

struct DouglasTolerances {
  double accept = 1e-7;
  double reject = 1e-4;
};

struct DouglasCertificate {
  std::string family_tag;
  DouglasVerdict verdict = DouglasVerdict::NotDouglas;
  double residual = 0.0;
  std::string criterion;  // which algebraic condition was evaluated
  bool warning = false;   // residual fell between accept and reject
  double max_s = 0.0;     // max |s_ij| over the samples (always reported)
  std::vector<double> tau;  // Berwald case: fitted τ(x) per sample
  std::string note;
};

/// Evaluates the family's algebraic Douglas condition at every sample.
/// Needs at least 20 samples. Throws UnsupportedError for GenericPower.
DouglasCertificate douglas_certificate(const AlphaBetaMetric& ab, std::span<const Point> samples,
                                       const DouglasTolerances& tol = {});

/// Max |∂³_{jkl}(T − T̄ − λ(T_div − T̄_div) y)| at (p, y).
double shared_douglas_residual(const AlphaBetaMetric& F, const AlphaBetaMetric& Fbar, const Point& p,
                               const TangentVector& y);

std::string to_string(DouglasVerdict v);

}  // namespace finslerkit
