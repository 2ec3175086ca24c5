#include "finslerkit/projective.hpp"

#include "finslerkit/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace finslerkit {

ProjectiveFit projective_residual(const SprayVector& G, const SprayVector& Gbar, const TangentVector& y) {
  const Eigen::VectorXd diff = G.G - Gbar.G;
  const double yy = y.y.squaredNorm();
  if (!(yy > 0.0)) throw DegenerateDirectionError("projective residual needs y ≠ 0");
  const double P = diff.dot(y.y) / yy;
  return {P, (diff - P * y.y).norm() / (1.0 + diff.norm())};
}

ThetaFit fit_theta(std::span<const TangentVector> ys, std::span<const Eigen::VectorXd> Z) {
  if (ys.size() != Z.size() || ys.empty()) throw std::invalid_argument("θ fit needs matching, nonempty probes");
  const Eigen::Index n = ys.front().y.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const auto& y = ys[k].y;
    M += y.squaredNorm() * y * y.transpose();
    rhs += y.dot(Z[k]) * y;
  }
  ThetaFit fit;
  fit.theta = M.ldlt().solve(rhs);
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const auto& y = ys[k].y;
    const double r = (Z[k] - fit.theta.dot(y) * y).norm() / (1.0 + Z[k].norm());
    fit.residuals.push_back(r);
    fit.max_residual = std::max(fit.max_residual, r);
  }
  return fit;
}

std::optional<Eigen::VectorXd> relation_vector(Relation rel, const PointGeometry& g, const PointGeometry& gbar,
                                               double q, const TangentVector& y, bool include_correction,
                                               double degenerate) {
  const std::span<const double> ys(y.y.data(), g.n);
  const auto c = contract<double>(g, ys);
  const auto cb = contract<double>(gbar, ys);
  const double alpha = c.alpha, beta = c.beta, b2 = g.bsq;

  double coef = 0.0;
  if (rel == Relation::Theorem1) {
    const double den = (1.0 - q * q) * beta * beta + (2.0 - q) * alpha * beta +
                       (1.0 + (q * q - q) * b2) * alpha * alpha;
    if (!(std::abs(den) > degenerate * alpha * alpha)) return std::nullopt;
    coef = 0.5 * q * (q - 1.0) * alpha * alpha * c.r00 / den;
  } else {
    const double den = beta * beta * (beta - alpha) + q * (b2 * alpha * alpha - beta * beta) * alpha;
    if (!(std::abs(den) > degenerate * alpha * alpha * alpha)) return std::nullopt;
    coef = q * alpha * alpha * alpha * c.r00 / (2.0 * den);
  }

  const auto ga = riemann_spray_at<double>(g.gamma, ys);
  const auto gab = riemann_spray_at<double>(gbar.gamma, ys);
  const double alpha_bar_sq = cb.alpha * cb.alpha;
  Eigen::VectorXd z(g.n);
  for (std::size_t i = 0; i < g.n; ++i)
    z[i] = ga[i] - gab[i] - (alpha_bar_sq * gbar.s_up[i] + cb.r00 * gbar.b_up[i]) / (2.0 * gbar.bsq);
  if (include_correction) z += coef * g.b_up;
  return z;
}

TangentVector sample_common_direction(std::span<const AlphaBetaMetric* const> metrics, const Point& p,
                                      std::mt19937_64& rng, double margin, std::size_t max_redraws) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = p.dim();
  for (std::size_t attempt = 0; attempt < max_redraws; ++attempt) {
    Eigen::VectorXd v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = normal(rng);
    const double norm = v.norm();
    if (!(norm > 0.0)) continue;
    TangentVector y(v / norm);
    if (std::all_of(metrics.begin(), metrics.end(), [&](const AlphaBetaMetric* m) { return admissible(*m, p, y, margin); }))
      return y;
  }
  std::ostringstream msg;
  msg << "no direction admissible for every metric after " << max_redraws << " draws at x = ("
      << p.x.transpose() << ")";
  throw ConfigError("probes", msg.str());
}

namespace {

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) return std::acos(0.0);
  return std::acos(std::clamp(std::abs(a.dot(b)) / (na * nb), 0.0, 1.0));
}

ProjectiveReport theorem_check(Relation rel, const AlphaBetaMetric& F, const AlphaBetaMetric& Fbar,
                               const DomainBox& box, std::mt19937_64& rng, const TheoremOptions& opts) {
  const std::size_t n = F.dimension();
  if (Fbar.dimension() != n || box.dim() != n) throw std::invalid_argument("dimension mismatch");
  if (n < 3) throw PreconditionError("the relation checkers need dimension ≥ 3");
  const PhiKind want = rel == Relation::Theorem1 ? PhiKind::QabPlus : PhiKind::QabMinus;
  if (F.family.kind != want || Fbar.family.kind != PhiKind::Kropina)
    throw UnsupportedError("unsupported pairing " + F.family.tag() + " / " + Fbar.family.tag());
  const double q = F.family.q;
  if (std::abs(q - 1.0) < 1e-3) throw PreconditionError("q must differ from 1");
  if (rel == Relation::Theorem2 && std::abs(q + 1.0) < 1e-3) throw PreconditionError("q must differ from -1");

  ProjectiveReport rep;
  rep.relation = rel == Relation::Theorem1 ? "theorem1" : "theorem2";

  const auto cert_samples = box.samples(opts.certificate_samples, rng);
  rep.douglas_F = douglas_certificate(F, cert_samples, opts.douglas);
  rep.douglas_Fbar = douglas_certificate(Fbar, cert_samples, opts.douglas);
  rep.douglas_ok = rep.douglas_F.verdict == DouglasVerdict::Douglas &&
                   rep.douglas_Fbar.verdict == DouglasVerdict::Douglas;

  const std::array<const AlphaBetaMetric*, 2> both{&F, &Fbar};
  const std::size_t dirs = std::max(2 * n, opts.directions == 0 ? 4 * n : opts.directions);
  rep.points = box.samples(opts.points, rng);
  for (const auto& p : rep.points) {
    const auto g = point_geometry(F.metric, F.oneform, p);
    const auto gb = point_geometry(Fbar.metric, Fbar.oneform, p);
    rep.collinearity_angle = std::max(rep.collinearity_angle, angle_between(g.b, gb.b));
    std::vector<TangentVector> ys;
    std::vector<Eigen::VectorXd> zs;
    for (std::size_t k = 0; k < dirs; ++k) {
      auto y = sample_common_direction(both, p, rng, opts.margin);
      ++rep.probes_drawn;
      auto z = relation_vector(rel, g, gb, q, y, opts.include_correction, opts.degenerate);
      if (!z) {
        ++rep.probes_skipped;
        continue;
      }
      ys.push_back(std::move(y));
      zs.push_back(std::move(*z));
    }
    if (ys.size() < n) throw ConfigError("probes", "too few non-degenerate directions at a probe point");
    const auto fit = fit_theta(ys, zs);
    rep.theta_fit.push_back(fit.theta);
    rep.max_residual = std::max(rep.max_residual, fit.max_residual);
  }
  if (static_cast<double>(rep.probes_skipped) > opts.max_skip_fraction * static_cast<double>(rep.probes_drawn)) {
    std::ostringstream msg;
    msg << rep.probes_skipped << " of " << rep.probes_drawn
        << " probes hit a vanishing denominator (limit " << opts.max_skip_fraction * 100 << "%)";
    throw ConfigError("probes", msg.str());
  }
  rep.fit_ok = rep.max_residual <= opts.fit_tolerance;
  rep.is_projective = rep.douglas_ok && rep.fit_ok;

  for (std::size_t k = 0; k < opts.fresh_probes; ++k) {
    Point p = box.sample(rng);
    auto y = sample_common_direction(both, p, rng, opts.margin);
    const auto fit = projective_residual(spray_closed(F, p, y), spray_closed(Fbar, p, y), y);
    rep.max_spray_residual = std::max(rep.max_spray_residual, fit.residual);
    rep.P_samples.push_back({std::move(p), std::move(y), fit.P, fit.residual});
  }

  auto& cor = rep.consequences;
  cor.closedness = rep.douglas_F.max_s;
  for (const auto& p : cert_samples)
    cor.kropina_condition =
        std::max(cor.kropina_condition, kropina_douglas_residual(point_geometry(Fbar.metric, Fbar.oneform, p)));
  cor.holds = rep.fit_ok && cor.closedness <= opts.douglas.accept && cor.kropina_condition <= opts.douglas.accept;
  cor.berwald = rel == Relation::Theorem1 && q == 2.0;
  if (cor.berwald) cor.tau = rep.douglas_F.tau;
  return rep;
}

}  // namespace

ProjectiveReport theorem1_check(const AlphaBetaMetric& F, const AlphaBetaMetric& Fbar, const DomainBox& box,
                                std::mt19937_64& rng, const TheoremOptions& opts) {
  return theorem_check(Relation::Theorem1, F, Fbar, box, rng, opts);
}

ProjectiveReport theorem2_check(const AlphaBetaMetric& F, const AlphaBetaMetric& Fbar, const DomainBox& box,
                                std::mt19937_64& rng, const TheoremOptions& opts) {
  return theorem_check(Relation::Theorem2, F, Fbar, box, rng, opts);
}

GeodesicPath geodesic(const AlphaBetaMetric& ab, const Point& p0, const TangentVector& y0, double h,
                      std::size_t steps) {
  if (!(h > 0.0)) throw std::invalid_argument("geodesic step must be positive");
  GeodesicPath path;
  path.metric_tag = ab.family.tag();
  path.t.push_back(0.0);
  path.x.push_back(p0.x);
  path.v.push_back(y0.y);
  const double f0 = finsler_norm(ab, p0, y0);

  auto accel = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return -2.0 * spray_closed(ab, Point(x), TangentVector(v)).G;
  };

  Eigen::VectorXd x = p0.x, v = y0.y;
  for (std::size_t k = 0; k < steps; ++k) {
    try {
      const Eigen::VectorXd k1x = v, k1v = accel(x, v);
      const Eigen::VectorXd k2x = v + 0.5 * h * k1v, k2v = accel(x + 0.5 * h * k1x, k2x);
      const Eigen::VectorXd k3x = v + 0.5 * h * k2v, k3v = accel(x + 0.5 * h * k2x, k3x);
      const Eigen::VectorXd k4x = v + h * k3v, k4v = accel(x + h * k3x, k4x);
      x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      const double f = finsler_norm(ab, Point(x), TangentVector(v));
      path.max_drift = std::max(path.max_drift, std::abs(f / f0 - 1.0));
    } catch (const FinslerError& e) {
      path.failed = true;
      path.failure = e.what();
      break;
    }
    path.t.push_back(static_cast<double>(k + 1) * h);
    path.x.push_back(x);
    path.v.push_back(v);
  }
  return path;
}

ConvergenceStudy convergence_order(const AlphaBetaMetric& ab, const Point& p0, const TangentVector& y0, double h,
                                   std::size_t steps) {
  const auto a = geodesic(ab, p0, y0, h, steps);
  const auto b = geodesic(ab, p0, y0, h / 2.0, 2 * steps);
  const auto c = geodesic(ab, p0, y0, h / 4.0, 4 * steps);
  if (a.failed || b.failed || c.failed) throw FinslerError("geodesic failed during the convergence study");
  ConvergenceStudy st;
  st.e1 = (a.x.back() - b.x.back()).norm();
  st.e2 = (b.x.back() - c.x.back()).norm();
  st.order = std::log2(st.e1 / st.e2);
  return st;
}

GeodesicPath truncate_arc_length(const GeodesicPath& path, double length) {
  GeodesicPath out;
  out.metric_tag = path.metric_tag;
  out.failed = path.failed;
  out.failure = path.failure;
  out.max_drift = path.max_drift;
  if (path.size() == 0) return out;
  out.t.push_back(path.t[0]);
  out.x.push_back(path.x[0]);
  out.v.push_back(path.v[0]);
  double acc = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double seg = (path.x[k] - path.x[k - 1]).norm();
    if (acc + seg >= length) {
      const double f = seg > 0.0 ? (length - acc) / seg : 0.0;
      out.t.push_back(path.t[k - 1] + f * (path.t[k] - path.t[k - 1]));
      out.x.push_back(path.x[k - 1] + f * (path.x[k] - path.x[k - 1]));
      out.v.push_back(path.v[k - 1] + f * (path.v[k] - path.v[k - 1]));
      return out;
    }
    acc += seg;
    out.t.push_back(path.t[k]);
    out.x.push_back(path.x[k]);
    out.v.push_back(path.v[k]);
  }
  return out;
}

namespace {

double point_segment(const Eigen::VectorXd& p, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd d = b - a;
  const double dd = d.squaredNorm();
  const double t = dd > 0.0 ? std::clamp((p - a).dot(d) / dd, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).norm();
}

double one_sided(const GeodesicPath& a, const GeodesicPath& b) {
  double worst = 0.0;
  for (const auto& p : a.x) {
    double best = std::numeric_limits<double>::infinity();
    if (b.size() == 1) best = (p - b.x[0]).norm();
    for (std::size_t k = 1; k < b.size(); ++k) best = std::min(best, point_segment(p, b.x[k - 1], b.x[k]));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double compare_paths(const GeodesicPath& a, const GeodesicPath& b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("compare_paths needs nonempty paths");
  if (a.dimension() != b.dimension()) throw std::invalid_argument("paths of different dimension");
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace finslerkit
