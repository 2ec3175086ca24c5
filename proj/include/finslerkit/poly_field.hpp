#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace finslerkit {

using Exponent = std::vector<int>;

/// Exact multivariate polynomial scalar field on R^n, stored as a sparse map
/// from exponent multi-index to coefficient. Zero coefficients are never
/// stored, so structural equality is polynomial equality.
class PolyField {
 public:
  explicit PolyField(std::size_t dim = 0) : dim_(dim) {}

  static PolyField constant(std::size_t dim, double c);
  /// The coordinate function x^k.
  static PolyField coordinate(std::size_t dim, std::size_t k);

  /// Adds c·x^e. Throws std::invalid_argument on a wrong-length or negative
  /// exponent or a non-finite coefficient.
  void add_term(const Exponent& e, double c);

  std::size_t dimension() const { return dim_; }
  const std::map<Exponent, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;

  /// ∂/∂x^k, exact.
  PolyField derivative(std::size_t k) const;

  template <class T>
  T eval(std::span<const T> x) const;

  double operator()(const Eigen::VectorXd& x) const;

  friend bool operator==(const PolyField&, const PolyField&) = default;

  friend PolyField operator+(const PolyField& a, const PolyField& b);
  friend PolyField operator-(const PolyField& a, const PolyField& b);
  friend PolyField operator*(const PolyField& a, const PolyField& b);
  friend PolyField operator*(double c, const PolyField& a);

 private:
  std::size_t dim_;
  std::map<Exponent, double> terms_;
};

template <class T>
T PolyField::eval(std::span<const T> x) const {
  T sum(0.0);
  if (terms_.empty()) return sum;
  // powers[k][e] = (x^k)^e, built up to the largest exponent used per axis.
  std::vector<int> max_exp(dim_, 0);
  for (const auto& [e, c] : terms_)
    for (std::size_t k = 0; k < dim_; ++k) max_exp[k] = std::max(max_exp[k], e[k]);
  std::vector<std::vector<T>> powers(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    powers[k].reserve(max_exp[k] + 1);
    powers[k].emplace_back(1.0);
    for (int p = 1; p <= max_exp[k]; ++p) powers[k].push_back(powers[k].back() * x[k]);
  }
  for (const auto& [e, c] : terms_) {
    T term(c);
    for (std::size_t k = 0; k < dim_; ++k)
      if (e[k] > 0) term = term * powers[k][e[k]];
    sum = sum + term;
  }
  return sum;
}

}  // namespace finslerkit
