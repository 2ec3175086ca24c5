#include "finslerkit/douglas.hpp"

#include "finslerkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace finslerkit {

double DouglasTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double DouglasTensor::max_diff(const DouglasTensor& other) const {
  if (other.n_ != n_) throw std::invalid_argument("Douglas tensors of different dimension");
  double m = 0.0;
  for (std::size_t k = 0; k < data_.size(); ++k) m = std::max(m, std::abs(data_[k] - other.data_[k]));
  return m;
}

double DouglasTensor::symmetry_defect() const {
  double m = 0.0;
  const auto& d = *this;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < n_; ++k)
        for (std::size_t l = 0; l < n_; ++l) {
          const double v = d(i, j, k, l);
          for (double w : {d(i, j, l, k), d(i, k, j, l), d(i, k, l, j), d(i, l, j, k), d(i, l, k, j)})
            m = std::max(m, std::abs(v - w));
        }
  return m;
}

DouglasTensor douglas_tensor(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y) {
  const auto g = point_geometry(ab.metric, ab.oneform, p);
  return douglas_tensor([&](std::span<const Jet4> yj) { return closed_spray<Jet4>(g, ab.family, yj); }, y);
}

SourceTerms source_terms(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y) {
  const auto g = point_geometry(ab.metric, ab.oneform, p);
  const std::span<const double> ys(y.y.data(), g.n);
  return {source_T<double>(g, ab.family, ys), source_div<double>(g, ab.family, ys), douglas_lambda(g.n)};
}

std::string to_string(DouglasVerdict v) { return v == DouglasVerdict::Douglas ? "douglas" : "not_douglas"; }

namespace {

// Per-point least squares of b_{i|j} against M = 2[(1+2b²)a − 3 b⊗b].
std::pair<double, double> berwald_tau(const PointGeometry& g) {
  const Eigen::MatrixXd m = 2.0 * ((1.0 + 2.0 * g.bsq) * g.a - 3.0 * g.b * g.b.transpose());
  const double mm = (m.array() * m.array()).sum();
  const double tau = mm > 0.0 ? (g.nabla_b.array() * m.array()).sum() / mm : 0.0;
  return {tau, (g.nabla_b - tau * m).cwiseAbs().maxCoeff()};
}

}  // namespace

DouglasCertificate douglas_certificate(const AlphaBetaMetric& ab, std::span<const Point> samples,
                                       const DouglasTolerances& tol) {
  if (samples.size() < 20)
    throw PreconditionError("Douglas certificate needs at least 20 sample points, got " +
                            std::to_string(samples.size()));
  const auto& fam = ab.family;
  DouglasCertificate cert;
  cert.family_tag = fam.tag();

  enum class Mode { Kropina, Closed, Berwald, Parallel } mode;
  switch (fam.kind) {
    case PhiKind::Kropina:
      mode = Mode::Kropina;
      cert.criterion = "s_ij = (b_i s_j - b_j s_i)/b^2";
      if (ab.dimension() == 2) cert.note = "n = 2: the condition holds identically";
      break;
    case PhiKind::QabPlus:
      if (fam.q == 1.0) {
        mode = Mode::Closed;
        cert.criterion = "s_ij = 0";
      } else if (fam.q == 2.0) {
        mode = Mode::Berwald;
        cert.criterion = "b_i|j = 2 tau [(1+2b^2) a_ij - 3 b_i b_j]";
      } else {
        mode = Mode::Parallel;
        cert.criterion = "b_i|j = 0";
      }
      break;
    case PhiKind::QabMinus:
      mode = Mode::Parallel;
      cert.criterion = "b_i|j = 0";
      break;
    default:
      throw UnsupportedError("no Douglas certificate for " + fam.tag());
  }

  double residual = 0.0;
  for (const auto& p : samples) {
    const auto g = point_geometry(ab.metric, ab.oneform, p);
    cert.max_s = std::max(cert.max_s, closedness_residual(g));
    switch (mode) {
      case Mode::Kropina:
        residual = std::max(residual, kropina_douglas_residual(g));
        break;
      case Mode::Closed:
        residual = std::max(residual, closedness_residual(g));
        break;
      case Mode::Berwald: {
        const auto [tau, res] = berwald_tau(g);
        cert.tau.push_back(tau);
        residual = std::max(residual, res);
        break;
      }
      case Mode::Parallel:
        residual = std::max(residual, g.nabla_b.cwiseAbs().maxCoeff());
        break;
    }
  }
  cert.residual = residual;
  cert.verdict = residual <= tol.accept ? DouglasVerdict::Douglas : DouglasVerdict::NotDouglas;
  cert.warning = residual > tol.accept && residual < tol.reject;
  return cert;
}

double shared_douglas_residual(const AlphaBetaMetric& F, const AlphaBetaMetric& Fbar, const Point& p,
                               const TangentVector& y) {
  const std::size_t n = F.dimension();
  if (Fbar.dimension() != n) throw std::invalid_argument("metrics of different dimension");
  const auto g = point_geometry(F.metric, F.oneform, p);
  const auto gb = point_geometry(Fbar.metric, Fbar.oneform, p);
  const double lambda = douglas_lambda(n);
  const std::span<const double> base(y.y.data(), n);
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) {
        const std::array<std::vector<double>, 3> dirs{detail::basis(n, j), detail::basis(n, k),
                                                      detail::basis(n, l)};
        const auto yj = seeded_vector<Jet3>(base, dirs);
        const std::span<const Jet3> ys(yj);
        const auto t = source_T<Jet3>(g, F.family, ys);
        const auto tb = source_T<Jet3>(gb, Fbar.family, ys);
        const Jet3 ddiv = source_div<Jet3>(g, F.family, ys) - source_div<Jet3>(gb, Fbar.family, ys);
        for (std::size_t i = 0; i < n; ++i) {
          const Jet3 e = t[i] - tb[i] - lambda * ddiv * yj[i];
          worst = std::max(worst, std::abs(coefficient(e, 0b111)));
        }
      }
  return worst;
}

}  // namespace finslerkit
