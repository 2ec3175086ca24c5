#pragma once

// Forward-mode dual numbers a + b·ε with ε² = 0.
//
// Nesting Dual<Dual<T>> adds one independent infinitesimal per level, so a
// Jet3 seeded with directions (u, v, w) carries every mixed directional
// derivative of order ≤ 3 in those directions, exactly up to rounding.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace finslerkit {

template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c), d(0.0) {}  // NOLINT: implicit lift of constants
  constexpr Dual(const T& value, const T& deriv) : v(value), d(deriv) {}
  explicit constexpr Dual(const T& value)
    requires(!std::is_same_v<T, double>)
      : v(value), d(0.0) {}

  friend constexpr Dual operator-(const Dual& a) { return {-a.v, -a.d}; }

  friend constexpr Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend constexpr Dual operator+(const Dual& a, double b) { return {a.v + b, a.d}; }
  friend constexpr Dual operator+(double a, const Dual& b) { return {a + b.v, b.d}; }

  friend constexpr Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend constexpr Dual operator-(const Dual& a, double b) { return {a.v - b, a.d}; }
  friend constexpr Dual operator-(double a, const Dual& b) { return {a - b.v, -b.d}; }

  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
  }
  friend constexpr Dual operator*(const Dual& a, double b) { return {a.v * b, a.d * b}; }
  friend constexpr Dual operator*(double a, const Dual& b) { return {a * b.v, a * b.d}; }

  friend constexpr Dual operator/(const Dual& a, const Dual& b) {
    const T inv = 1.0 / b.v;
    const T q = a.v * inv;
    return {q, (a.d - q * b.d) * inv};
  }
  friend constexpr Dual operator/(const Dual& a, double b) { return {a.v / b, a.d / b}; }
  friend constexpr Dual operator/(double a, const Dual& b) {
    const T inv = 1.0 / b.v;
    const T q = a * inv;
    return {q, -(q * b.d) * inv};
  }

  constexpr Dual& operator+=(const Dual& b) { return *this = *this + b; }
  constexpr Dual& operator-=(const Dual& b) { return *this = *this - b; }
  constexpr Dual& operator*=(const Dual& b) { return *this = *this * b; }
  constexpr Dual& operator/=(const Dual& b) { return *this = *this / b; }
  constexpr Dual& operator+=(double b) { return *this = *this + b; }
  constexpr Dual& operator*=(double b) { return *this = *this * b; }

  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    const T r = sqrt(a.v);
    return {r, a.d / (2.0 * r)};
  }
  friend Dual pow(const Dual& a, double p) {
    using std::pow;
    return {pow(a.v, p), p * pow(a.v, p - 1.0) * a.d};
  }
  friend Dual exp(const Dual& a) {
    using std::exp;
    const T e = exp(a.v);
    return {e, e * a.d};
  }
  friend Dual log(const Dual& a) {
    using std::log;
    return {log(a.v), a.d / a.v};
  }
};

using Jet1 = Dual<double>;
using Jet2 = Dual<Jet1>;
using Jet3 = Dual<Jet2>;
using Jet4 = Dual<Jet3>;

template <class T>
struct jet_depth : std::integral_constant<std::size_t, 0> {};
template <class T>
struct jet_depth<Dual<T>> : std::integral_constant<std::size_t, 1 + jet_depth<T>::value> {};
template <class T>
inline constexpr std::size_t jet_depth_v = jet_depth<T>::value;

/// Value part with every infinitesimal stripped.
constexpr double primal(double x) { return x; }
template <class T>
constexpr double primal(const Dual<T>& x) {
  return primal(x.v);
}

/// Builds a jet for one coordinate: value plus a constant seed per level.
/// `seeds[0]` belongs to the innermost level.
template <class J>
J seeded(double value, std::span<const double> seeds) {
  if constexpr (std::is_same_v<J, double>) {
    return value;
  } else {
    using Inner = decltype(J{}.v);
    const std::size_t depth = jet_depth_v<J>;
    return J{seeded<Inner>(value, seeds.first(depth - 1)), Inner(seeds[depth - 1])};
  }
}

/// Mixed-derivative coefficient: `mask` bit l selects the derivative part at
/// level l (bit 0 is the innermost level).
template <class J>
double coefficient(const J& x, unsigned mask) {
  if constexpr (std::is_same_v<J, double>) {
    return x;
  } else {
    const std::size_t top = jet_depth_v<J> - 1;
    return (mask >> top) & 1u ? coefficient(x.d, mask & ~(1u << top))
                              : coefficient(x.v, mask & ~(1u << top));
  }
}

/// Vector of jets x_i = base_i + Σ_l t_l·dirs[l]_i.
template <class J>
std::vector<J> seeded_vector(std::span<const double> base,
                             std::span<const std::vector<double>> dirs) {
  std::vector<J> out(base.size());
  std::array<double, 8> seeds{};
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t l = 0; l < dirs.size(); ++l) seeds[l] = dirs[l][i];
    out[i] = seeded<J>(base[i], std::span<const double>(seeds.data(), jet_depth_v<J>));
  }
  return out;
}

/// Promotes plain values to constant jets.
template <class J>
std::vector<J> constant_vector(std::span<const double> base) {
  std::vector<J> out;
  out.reserve(base.size());
  for (double b : base) out.emplace_back(b);
  return out;
}

}  // namespace finslerkit
