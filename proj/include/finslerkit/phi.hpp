#pragma once

// φ-families of (α,β)-metrics F = αφ(β/α) and the derived factors
// Q, Q', Q'', Δ, Θ, Ψ used by the spray formula.

#include "finslerkit/dual.hpp"
#include "finslerkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

namespace finslerkit {

enum class PhiKind {
  QabPlus,       // φ(s) = (1+s)^q
  QabMinus,      // φ(s) = s^q / (s−1)^(q−1)
  Kropina,       // φ(s) = 1/s
  GenericPower,  // φ(s) = Σ_k c_k s^k
};

struct PhiFamily {
  PhiKind kind = PhiKind::QabPlus;
  double q = 0.0;
  std::vector<double> coeffs;  // GenericPower only

  static PhiFamily qab_plus(double q) { return {PhiKind::QabPlus, q, {}}; }
  static PhiFamily qab_minus(double q) { return {PhiKind::QabMinus, q, {}}; }
  static PhiFamily kropina() { return {PhiKind::Kropina, 0.0, {}}; }
  static PhiFamily generic_power(std::vector<double> c) { return {PhiKind::GenericPower, 0.0, std::move(c)}; }

  std::string tag() const;
  friend bool operator==(const PhiFamily&, const PhiFamily&) = default;
};

/// φ and its first three s-derivatives.
template <class T>
struct PhiJetT {
  T phi, dphi, d2phi, d3phi;
};
using PhiJet = PhiJetT<double>;

/// Admissible s-domain of each family:
///   QabPlus  1 + s > 0
///   QabMinus s > 1      (β > α)
///   Kropina  s > 0      (β > 0)
bool in_domain(const PhiFamily& family, double s);

template <class T>
PhiJetT<T> phi_jet(const PhiFamily& family, const T& s) {
  using std::pow;
  const double s0 = primal(s);
  if (!in_domain(family, s0)) {
    std::ostringstream msg;
    msg << "s = " << s0 << " outside the domain of " << family.tag();
    throw SingularSError(msg.str(), s0);
  }
  const double q = family.q;
  switch (family.kind) {
    case PhiKind::QabPlus: {
      const T u = 1.0 + s;
      return {pow(u, q), q * pow(u, q - 1.0), q * (q - 1.0) * pow(u, q - 2.0),
              q * (q - 1.0) * (q - 2.0) * pow(u, q - 3.0)};
    }
    case PhiKind::QabMinus: {
      // Logarithmic derivatives L_k = d^k/ds^k log φ.
      const T phi = pow(s, q) * pow(s - 1.0, 1.0 - q);
      const T inv_s = 1.0 / s;
      const T inv_m = 1.0 / (s - 1.0);
      const T l1 = q * inv_s - (q - 1.0) * inv_m;
      const T l2 = -q * inv_s * inv_s + (q - 1.0) * inv_m * inv_m;
      const T l3 = 2.0 * q * inv_s * inv_s * inv_s - 2.0 * (q - 1.0) * inv_m * inv_m * inv_m;
      return {phi, phi * l1, phi * (l1 * l1 + l2), phi * (l1 * l1 * l1 + 3.0 * l1 * l2 + l3)};
    }
    case PhiKind::Kropina: {
      const T inv = 1.0 / s;
      const T inv2 = inv * inv;
      return {inv, -inv2, 2.0 * inv2 * inv, -6.0 * inv2 * inv2};
    }
    case PhiKind::GenericPower: {
      PhiJetT<T> j{T(0.0), T(0.0), T(0.0), T(0.0)};
      // Horner on the polynomial and its derivatives.
      const auto& c = family.coeffs;
      const std::size_t m = c.size();
      for (std::size_t k = m; k-- > 0;) {
        j.d3phi = j.d3phi * s + 3.0 * j.d2phi;
        j.d2phi = j.d2phi * s + 2.0 * j.dphi;
        j.dphi = j.dphi * s + j.phi;
        j.phi = j.phi * s + c[k];
      }
      return j;
    }
  }
  throw UnsupportedError("unknown φ-family");
}

/// φ(s) alone, with the same domain check as phi_jet.
template <class T>
T phi_value(const PhiFamily& family, const T& s) {
  using std::pow;
  const double s0 = primal(s);
  if (!in_domain(family, s0)) {
    std::ostringstream msg;
    msg << "s = " << s0 << " outside the domain of " << family.tag();
    throw SingularSError(msg.str(), s0);
  }
  switch (family.kind) {
    case PhiKind::QabPlus:
      return pow(1.0 + s, family.q);
    case PhiKind::QabMinus:
      return pow(s, family.q) * pow(s - 1.0, 1.0 - family.q);
    case PhiKind::Kropina:
      return 1.0 / s;
    case PhiKind::GenericPower: {
      T acc(0.0);
      for (std::size_t k = family.coeffs.size(); k-- > 0;) acc = acc * s + family.coeffs[k];
      return acc;
    }
  }
  throw UnsupportedError("unknown φ-family");
}

template <class T>
struct QJetT {
  T Q, dQ, d2Q;
};
using QJet = QJetT<double>;

/// Smallest |φ − sφ'| accepted before Q counts as undefined.
inline constexpr double kDegenerateDirection = 1e-14;
inline constexpr double kSingularDelta = 1e-14;

template <class T>
QJetT<T> q_jet(const PhiFamily& family, const T& s) {
  const auto j = phi_jet(family, s);
  const T den = j.phi - s * j.dphi;
  if (!(std::abs(primal(den)) > kDegenerateDirection * std::max(1.0, std::abs(primal(j.phi))))) {
    std::ostringstream msg;
    msg << "φ − sφ' vanishes at s = " << primal(s) << " for " << family.tag();
    throw DegenerateDirectionError(msg.str());
  }
  const T inv = 1.0 / den;
  const T inv2 = inv * inv;
  return {j.dphi * inv, j.phi * j.d2phi * inv2,
          (j.dphi * j.d2phi + j.phi * j.d3phi) * inv2 + 2.0 * s * j.phi * j.d2phi * j.d2phi * inv2 * inv};
}

/// Q, Q', Q'', Δ, Θ, Ψ and dΨ/ds (b² held fixed).
template <class T>
struct FactorsT {
  T Q, dQ, d2Q;
  T Delta, Theta, Psi, dPsi;
};
using GeometryFactors = FactorsT<double>;

template <class T>
FactorsT<T> geometry_factors(const PhiFamily& family, const T& s, double bsq) {
  const auto qj = q_jet(family, s);
  const T gap = bsq - s * s;
  const T delta = 1.0 + s * qj.Q + gap * qj.dQ;
  if (!(std::abs(primal(delta)) > kSingularDelta)) {
    std::ostringstream msg;
    msg << "Δ vanishes at s = " << primal(s) << ", b² = " << bsq << " for " << family.tag();
    throw SingularDeltaError(msg.str());
  }
  // Δ' = Q − sQ' + (b² − s²)Q''
  const T ddelta = qj.Q - s * qj.dQ + gap * qj.d2Q;
  const T inv = 1.0 / delta;
  return {qj.Q,
          qj.dQ,
          qj.d2Q,
          delta,
          0.5 * (qj.Q - s * qj.dQ) * inv,
          0.5 * qj.dQ * inv,
          0.5 * (qj.d2Q * delta - qj.dQ * ddelta) * inv * inv};
}

/// Family-specific closed forms of the factors, written out independently of
/// the generic pipeline. Throws UnsupportedError for GenericPower.
GeometryFactors closed_form_factors(const PhiFamily& family, double s, double bsq);

struct RegularityOptions {
  std::size_t grid = 2001;
};

struct RegularityReport {
  bool ok = true;
  std::vector<double> violations;  // s values where a positivity condition fails
  double worst_margin = 0.0;       // min over the grid of min(φ, φ−sφ', Δ)
  std::string note;
};

/// Scans s over the family's admissible part of [−b_max, b_max] and checks
/// φ > 0, φ − sφ' > 0 and Δ > 0 with b² = b_max².
RegularityReport regularity_check(const PhiFamily& family, double b_max,
                                  const RegularityOptions& opts = {});

}  // namespace finslerkit
