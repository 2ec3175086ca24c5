#include "finslerkit/spray.hpp"

#include <algorithm>
#include <array>

namespace finslerkit {

namespace {

std::span<const double> span_of(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::vector<double> unit(std::size_t n, std::size_t k) {
  std::vector<double> e(n, 0.0);
  e[k] = 1.0;
  return e;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_dims(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y) {
  if (p.dim() != ab.dimension() || y.dim() != ab.dimension())
    throw std::invalid_argument("point/direction dimension does not match the metric");
}

}  // namespace

double s_value(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y) {
  check_dims(ab, p, y);
  const Eigen::MatrixXd a = ab.metric.at(p);
  const double alpha = std::sqrt(y.y.dot(a * y.y));
  detail::check_alpha(alpha, span_of(y.y));
  return ab.oneform.at(p).dot(y.y) / alpha;
}

double finsler_norm(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y) {
  check_dims(ab, p, y);
  return std::sqrt(finsler_sq<double>(ab, span_of(p.x), span_of(y.y)));
}

bool admissible(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y, double margin) {
  const Eigen::MatrixXd a = ab.metric.at(p);
  const double alpha_sq = y.y.dot(a * y.y);
  if (!(alpha_sq > 0.0)) return false;
  const double alpha = std::sqrt(alpha_sq);
  if (alpha < kAlphaFloor * y.y.norm()) return false;
  const double s = ab.oneform.at(p).dot(y.y) / alpha;
  switch (ab.family.kind) {
    case PhiKind::QabPlus:
      return 1.0 + s > margin;
    case PhiKind::QabMinus:
      return s > 1.0 + margin;
    case PhiKind::Kropina:
      return s > margin;
    case PhiKind::GenericPower:
      return std::isfinite(s);
  }
  return false;
}

FundamentalTensor fundamental_tensor(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y) {
  check_dims(ab, p, y);
  const std::size_t n = ab.dimension();
  const auto x = constant_vector<Jet2>(span_of(p.x));
  FundamentalTensor out;
  out.g.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::array<std::vector<double>, 2> dirs{unit(n, i), unit(n, j)};
      const auto yj = seeded_vector<Jet2>(span_of(y.y), dirs);
      const Jet2 f2 = finsler_sq<Jet2>(ab, x, yj);
      out.g(i, j) = out.g(j, i) = 0.5 * coefficient(f2, 0b11);
    }
  }
  out.positive_definite = is_positive_definite(out.g);
  return out;
}

SprayVector spray_oracle(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y) {
  check_dims(ab, p, y);
  const std::size_t n = ab.dimension();
  const auto g = fundamental_tensor(ab, p, y).g;
  const std::vector<double> zero(n, 0.0);
  const std::vector<double> ydir(y.y.data(), y.y.data() + n);

  Eigen::VectorXd rhs(n);
  {
    // Outer level: x moves along y. Inner level: y moves along e_l.
    const std::array<std::vector<double>, 2> xdirs{zero, ydir};
    const auto xj = seeded_vector<Jet2>(span_of(p.x), xdirs);
    const auto yconst = constant_vector<Jet1>(span_of(y.y));
    for (std::size_t l = 0; l < n; ++l) {
      const std::array<std::vector<double>, 2> ydirs{unit(n, l), zero};
      const auto yj = seeded_vector<Jet2>(span_of(y.y), ydirs);
      const double mixed = coefficient(finsler_sq<Jet2>(ab, xj, yj), 0b11);

      const std::array<std::vector<double>, 1> gdir{unit(n, l)};
      const auto xg = seeded_vector<Jet1>(span_of(p.x), gdir);
      const double grad = coefficient(finsler_sq<Jet1>(ab, xg, yconst), 0b1);
      rhs[l] = mixed - grad;
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  const double scale = g.cwiseAbs().maxCoeff();
  if (!lu.isInvertible() || !(scale > 0.0) ||
      lu.matrixLU().diagonal().cwiseAbs().minCoeff() < kDegeneratePivot * scale) {
    throw DegenerateMetricError("fundamental tensor is singular at this (x, y)");
  }
  return {0.25 * lu.solve(rhs)};
}

SprayVector spray_closed(const PointGeometry& g, const PhiFamily& family, const TangentVector& y) {
  if (y.dim() != g.n) throw std::invalid_argument("direction dimension mismatch");
  return {to_eigen(closed_spray<double>(g, family, span_of(y.y)))};
}

SprayVector spray_closed(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y) {
  check_dims(ab, p, y);
  return spray_closed(point_geometry(ab.metric, ab.oneform, p), ab.family, y);
}

double closedness_residual(const PointGeometry& g) { return g.s.cwiseAbs().maxCoeff(); }

double kropina_douglas_residual(const PointGeometry& g) {
  if (!(g.bsq > 0.0)) throw PreconditionError("Kropina 1-form vanishes at the point");
  const Eigen::MatrixXd target = (g.b * g.s_vec.transpose() - g.s_vec * g.b.transpose()) / g.bsq;
  return (g.s - target).cwiseAbs().maxCoeff();
}

SprayVector spray_family(const AlphaBetaMetric& ab, const Point& p, const TangentVector& y, double tolerance) {
  check_dims(ab, p, y);
  const auto g = point_geometry(ab.metric, ab.oneform, p);
  const auto c = contract<double>(g, span_of(y.y));
  detail::check_alpha(c.alpha, span_of(y.y));
  const double s = c.beta / c.alpha;
  if (!in_domain(ab.family, s)) throw SingularSError("direction outside the admissible cone", s);

  const auto ga = riemann_spray_at<double>(g.gamma, span_of(y.y));
  Eigen::VectorXd out = to_eigen(ga);
  const double alpha = c.alpha, beta = c.beta, b2 = g.bsq, q = ab.family.q;

  auto require_closed = [&] {
    const double res = closedness_residual(g);
    if (res > tolerance) {
      std::ostringstream msg;
      msg << "specialized spray needs a closed 1-form; max |s_ij| = " << res;
      throw PreconditionError(msg.str());
    }
  };

  switch (ab.family.kind) {
    case PhiKind::QabPlus: {
      require_closed();
      const double den = (1.0 - q * q) * beta * beta + (2.0 - q) * alpha * beta +
                         (1.0 + q * (q - 1.0) * b2) * alpha * alpha;
      if (den == 0.0) throw SingularDeltaError("denominator of the specialized spray vanishes");
      out += 0.5 * q * (alpha - 2.0 * (q - 1.0) * beta) * c.r00 / den * y.y;
      out += 0.5 * q * (q - 1.0) * alpha * alpha * c.r00 / den * g.b_up;
      return {out};
    }
    case PhiKind::QabMinus: {
      require_closed();
      const double den = beta * beta * (beta - alpha) + q * (b2 * alpha * alpha - beta * beta) * alpha;
      if (den == 0.0) throw SingularDeltaError("denominator of the specialized spray vanishes");
      out += 0.5 * beta * (beta - 2.0 * q * alpha) * c.r00 / den * y.y;
      out += 0.5 * q * alpha * alpha * alpha * c.r00 / den * g.b_up;
      return {out};
    }
    case PhiKind::Kropina: {
      const double res = kropina_douglas_residual(g);
      if (res > tolerance) {
        std::ostringstream msg;
        msg << "Kropina specialized spray needs s_ij = (b_i s_j − b_j s_i)/b²; residual = " << res;
        throw PreconditionError(msg.str());
      }
      const Eigen::VectorXd bracket = -alpha * alpha * g.s_up + 2.0 * c.s0 * y.y - c.r00 * g.b_up +
                                      2.0 * c.r00 * beta / (alpha * alpha) * y.y;
      out -= bracket / (2.0 * b2);
      return {out};
    }
    case PhiKind::GenericPower:
      break;
  }
  throw UnsupportedError("no specialized spray for " + ab.family.tag());
}

TangentVector sample_direction(const AlphaBetaMetric& ab, const Point& p, std::mt19937_64& rng,
                               double margin, std::size_t max_redraws) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = ab.dimension();
  for (std::size_t attempt = 0; attempt < max_redraws; ++attempt) {
    Eigen::VectorXd v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = normal(rng);
    const double norm = v.norm();
    if (!(norm > 0.0)) continue;
    TangentVector y(v / norm);
    if (admissible(ab, p, y, margin)) return y;
  }
  throw ConfigError("probes", "no admissible direction found after " + std::to_string(max_redraws) +
                                  " draws at x = (" + [&] {
                                    std::ostringstream s;
                                    s << p.x.transpose();
                                    return s.str();
                                  }() + ")");
}

}  // namespace finslerkit
