#include "finslerkit/phi.hpp"

#include <limits>

namespace finslerkit {

std::string PhiFamily::tag() const {
  std::ostringstream out;
  switch (kind) {
    case PhiKind::QabPlus:
      out << "qab_plus(q=" << q << ")";
      break;
    case PhiKind::QabMinus:
      out << "qab_minus(q=" << q << ")";
      break;
    case PhiKind::Kropina:
      out << "kropina";
      break;
    case PhiKind::GenericPower:
      out << "generic_power(";
      for (std::size_t k = 0; k < coeffs.size(); ++k) out << (k ? "," : "") << coeffs[k];
      out << ")";
      break;
  }
  return out.str();
}

bool in_domain(const PhiFamily& family, double s) {
  if (!std::isfinite(s)) return false;
  switch (family.kind) {
    case PhiKind::QabPlus:
      return 1.0 + s > 0.0;
    case PhiKind::QabMinus:
      return s > 1.0;
    case PhiKind::Kropina:
      return s > 0.0;
    case PhiKind::GenericPower:
      return true;
  }
  return false;
}

GeometryFactors closed_form_factors(const PhiFamily& family, double s, double bsq) {
  if (!in_domain(family, s)) {
    std::ostringstream msg;
    msg << "s = " << s << " outside the domain of " << family.tag();
    throw SingularSError(msg.str(), s);
  }
  const double q = family.q;
  GeometryFactors f{};
  switch (family.kind) {
    case PhiKind::QabPlus: {
      // Q = q / (s(1−q) + 1)
      const double u = s * (1.0 - q) + 1.0;
      const double den = s * s * (1.0 - q * q) + s * (2.0 - q) + 1.0 + bsq * q * (q - 1.0);
      if (u == 0.0) throw DegenerateDirectionError("s(1−q) + 1 vanishes");
      if (den == 0.0) throw SingularDeltaError("Δ vanishes");
      f.Q = q / u;
      f.dQ = q * (q - 1.0) / (u * u);
      f.d2Q = 2.0 * q * (q - 1.0) * (q - 1.0) / (u * u * u);
      f.Delta = den / (u * u);
      f.Theta = 0.5 * q * (1.0 - 2.0 * (q - 1.0) * s) / den;
      f.Psi = 0.5 * q * (q - 1.0) / den;
      f.dPsi = -0.5 * q * (q - 1.0) * (2.0 * s * (1.0 - q * q) + (2.0 - q)) / (den * den);
      return f;
    }
    case PhiKind::Kropina: {
      if (bsq == 0.0) throw SingularDeltaError("Δ vanishes (b = 0)");
      f.Q = -1.0 / (2.0 * s);
      f.dQ = 1.0 / (2.0 * s * s);
      f.d2Q = -1.0 / (s * s * s);
      f.Delta = bsq / (2.0 * s * s);
      f.Theta = -s / bsq;
      f.Psi = 1.0 / (2.0 * bsq);
      f.dPsi = 0.0;
      return f;
    }
    case PhiKind::QabMinus: {
      // Q = (s − q) / ((q − 1)s)
      const double bracket = s * s * (s - 1.0) + q * (bsq - s * s);
      if (q == 1.0) throw DegenerateDirectionError("q = 1 makes φ − sφ' vanish");
      if (bracket == 0.0) throw SingularDeltaError("Δ vanishes");
      f.Q = (s - q) / ((q - 1.0) * s);
      f.dQ = q / ((q - 1.0) * s * s);
      f.d2Q = -2.0 * q / ((q - 1.0) * s * s * s);
      f.Delta = bracket / ((q - 1.0) * s * s);
      f.Theta = s * (s - 2.0 * q) / (2.0 * bracket);
      f.Psi = q / (2.0 * bracket);
      const double dbracket = 3.0 * s * s - 2.0 * s - 2.0 * q * s;
      f.dPsi = -q * dbracket / (2.0 * bracket * bracket);
      return f;
    }
    case PhiKind::GenericPower:
      break;
  }
  throw UnsupportedError("no closed-form factors for " + family.tag());
}

RegularityReport regularity_check(const PhiFamily& family, double b_max, const RegularityOptions& opts) {
  RegularityReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  const std::size_t grid = std::max<std::size_t>(opts.grid, 1000);
  const double bsq = b_max * b_max;

  double lo = -b_max;
  double hi = b_max;
  bool open_lo = false;
  switch (family.kind) {
    case PhiKind::Kropina:
      lo = 0.0;
      open_lo = true;
      break;
    case PhiKind::QabMinus:
      lo = 1.0;
      open_lo = true;
      if (b_max <= 1.0) {
        report.ok = false;
        report.note = "admissible cone β > α is empty for b_max ≤ 1";
        report.worst_margin = 0.0;
        return report;
      }
      break;
    default:
      break;
  }
  if (open_lo && b_max <= lo) {
    report.ok = false;
    report.note = "admissible s-interval is empty";
    report.worst_margin = 0.0;
    return report;
  }

  for (std::size_t k = 0; k < grid; ++k) {
    double s = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid - 1);
    if (open_lo && k == 0) continue;
    if (family.kind == PhiKind::QabPlus && 1.0 + s == 0.0) continue;
    if (!in_domain(family, s)) {
      report.violations.push_back(s);
      continue;
    }
    try {
      const auto j = phi_jet(family, s);
      const double gap = j.phi - s * j.dphi;
      double margin = std::min(j.phi, gap);
      if (gap > 0.0) {
        const auto f = geometry_factors(family, s, bsq);
        margin = std::min(margin, f.Delta);
      }
      report.worst_margin = std::min(report.worst_margin, margin);
      if (!(margin > 0.0)) report.violations.push_back(s);
    } catch (const FinslerError&) {
      report.violations.push_back(s);
      report.worst_margin = std::min(report.worst_margin, 0.0);
    }
  }
  report.ok = report.violations.empty();
  return report;
}

}  // namespace finslerkit
