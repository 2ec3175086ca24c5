#include "finslerkit/poly_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace finslerkit {

PolyField PolyField::constant(std::size_t dim, double c) {
  PolyField p(dim);
  p.add_term(Exponent(dim, 0), c);
  return p;
}

PolyField PolyField::coordinate(std::size_t dim, std::size_t k) {
  if (k >= dim) throw std::invalid_argument("coordinate index out of range");
  PolyField p(dim);
  Exponent e(dim, 0);
  e[k] = 1;
  p.add_term(e, 1.0);
  return p;
}

void PolyField::add_term(const Exponent& e, double c) {
  if (e.size() != dim_)
    throw std::invalid_argument("exponent has length " + std::to_string(e.size()) +
                                ", expected " + std::to_string(dim_));
  if (std::any_of(e.begin(), e.end(), [](int v) { return v < 0; }))
    throw std::invalid_argument("negative exponent");
  if (!std::isfinite(c)) throw std::invalid_argument("non-finite coefficient");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

int PolyField::degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int total = 0;
    for (int v : e) total += v;
    deg = std::max(deg, total);
  }
  return deg;
}

PolyField PolyField::derivative(std::size_t k) const {
  if (k >= dim_) throw std::invalid_argument("derivative index out of range");
  PolyField out(dim_);
  for (const auto& [e, c] : terms_) {
    if (e[k] == 0) continue;
    Exponent de = e;
    de[k] -= 1;
    out.add_term(de, c * e[k]);
  }
  return out;
}

double PolyField::operator()(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_)
    throw std::invalid_argument("point dimension mismatch");
  return eval<double>(std::span<const double>(x.data(), dim_));
}

PolyField operator+(const PolyField& a, const PolyField& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("dimension mismatch");
  PolyField out = a;
  for (const auto& [e, c] : b.terms_) out.add_term(e, c);
  return out;
}

PolyField operator-(const PolyField& a, const PolyField& b) { return a + (-1.0) * b; }

PolyField operator*(const PolyField& a, const PolyField& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("dimension mismatch");
  PolyField out(a.dim_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e(a.dim_);
      for (std::size_t k = 0; k < a.dim_; ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

PolyField operator*(double c, const PolyField& a) {
  PolyField out(a.dim_);
  for (const auto& [e, v] : a.terms_) out.add_term(e, c * v);
  return out;
}

}  // namespace finslerkit
