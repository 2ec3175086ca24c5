#include "finslerkit/fields.hpp"

#include "finslerkit/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace finslerkit {

MetricField::MetricField(std::vector<std::vector<PolyField>> components) : n_(components.size()) {
  if (n_ == 0) throw std::invalid_argument("metric table is empty");
  a_.reserve(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (components[i].size() != n_)
      throw std::invalid_argument("metric row " + std::to_string(i) + " has " +
                                  std::to_string(components[i].size()) + " entries, expected " +
                                  std::to_string(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      if (components[i][j].dimension() != n_)
        throw std::invalid_argument("metric component (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") lives on the wrong dimension");
      a_.push_back(std::move(components[i][j]));
    }
  }
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (!(a_[i * n_ + j] == a_[j * n_ + i]))
        throw std::invalid_argument("metric is not symmetric: a_" + std::to_string(i) +
                                    std::to_string(j) + " != a_" + std::to_string(j) +
                                    std::to_string(i));
  da_.reserve(n_ * n_ * n_);
  for (std::size_t k = 0; k < n_; ++k)
    for (std::size_t ij = 0; ij < n_ * n_; ++ij) da_.push_back(a_[ij].derivative(k));
}

MetricField MetricField::euclidean(std::size_t n) {
  std::vector<std::vector<PolyField>> rows(n, std::vector<PolyField>(n, PolyField(n)));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = PolyField::constant(n, 1.0);
  return MetricField(std::move(rows));
}

Eigen::MatrixXd MetricField::at(const Point& p) const {
  if (p.dim() != n_) throw std::invalid_argument("point dimension mismatch");
  const auto v = eval<double>(std::span<const double>(p.x.data(), n_));
  Eigen::MatrixXd m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = v[i * n_ + j];
  return m;
}

Eigen::MatrixXd MetricField::derivative_at(std::size_t k, const Point& p) const {
  Eigen::MatrixXd m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = da_[k * n_ * n_ + i * n_ + j](p.x);
  return m;
}

MetricField MetricField::conformal(const PolyField& factor) const {
  std::vector<std::vector<PolyField>> rows(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) rows[i].push_back(factor * component(i, j));
  return MetricField(std::move(rows));
}

OneFormField::OneFormField(std::vector<PolyField> components) : b_(std::move(components)) {
  const std::size_t n = b_.size();
  if (n == 0) throw std::invalid_argument("1-form table is empty");
  for (std::size_t i = 0; i < n; ++i)
    if (b_[i].dimension() != n)
      throw std::invalid_argument("1-form component " + std::to_string(i) +
                                  " lives on the wrong dimension");
  db_.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) db_.push_back(b_[i].derivative(j));
}

bool OneFormField::is_identically_zero() const {
  for (const auto& c : b_)
    if (!c.is_zero()) return false;
  return true;
}

Eigen::VectorXd OneFormField::at(const Point& p) const {
  if (p.dim() != b_.size()) throw std::invalid_argument("point dimension mismatch");
  Eigen::VectorXd v(b_.size());
  for (std::size_t i = 0; i < b_.size(); ++i) v[i] = b_[i](p.x);
  return v;
}

Eigen::MatrixXd OneFormField::jacobian_at(const Point& p) const {
  const std::size_t n = b_.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = db_[i * n + j](p.x);
  return m;
}

OneFormField OneFormField::scaled(const PolyField& factor) const {
  std::vector<PolyField> out;
  for (const auto& c : b_) out.push_back(factor * c);
  return OneFormField(std::move(out));
}

bool is_positive_definite(const Eigen::MatrixXd& a) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success) return false;
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  return scale > 0.0 && ldlt.vectorD().minCoeff() >= kDegeneratePivot * scale;
}

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& a) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
      ldlt.vectorD().minCoeff() < kDegeneratePivot * scale) {
    std::ostringstream msg;
    msg << "degenerate metric: smallest pivot " << ldlt.vectorD().minCoeff() << " vs scale "
        << scale;
    throw DegenerateMetricError(msg.str());
  }
  return ldlt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

void check_positive_definite(const MetricField& metric, std::span<const Point> samples) {
  for (const auto& p : samples) {
    if (!is_positive_definite(metric.at(p))) {
      std::ostringstream msg;
      msg << "metric is not positive definite at x = (" << p.x.transpose() << ")";
      throw DegenerateMetricError(msg.str());
    }
  }
}

Christoffel christoffel(const MetricField& metric, const Point& p) {
  const std::size_t n = metric.dimension();
  const Eigen::MatrixXd inv = checked_inverse(metric.at(p));
  std::vector<Eigen::MatrixXd> da;
  da.reserve(n);
  for (std::size_t k = 0; k < n; ++k) da.push_back(metric.derivative_at(k, p));

  // First-kind symbols [jk, l] = ½(∂_j a_lk + ∂_k a_lj − ∂_l a_jk), symmetric in (j,k).
  Christoffel gamma(n);
  std::vector<double> first(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      for (std::size_t l = 0; l < n; ++l) first[l] = 0.5 * (da[j](l, k) + da[k](l, j) - da[l](j, k));
      for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t l = 0; l < n; ++l) v += inv(i, l) * first[l];
        gamma(i, j, k) = gamma(i, k, j) = v;
      }
    }
  }
  return gamma;
}

SprayVector riemann_spray(const MetricField& metric, const Point& p, const TangentVector& y) {
  const auto gamma = christoffel(metric, p);
  const auto g = riemann_spray_at<double>(gamma, std::span<const double>(y.y.data(), y.dim()));
  return {Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()))};
}

PointGeometry point_geometry(const MetricField& metric, const OneFormField& oneform, const Point& p) {
  const std::size_t n = metric.dimension();
  if (oneform.dimension() != n) throw std::invalid_argument("metric and 1-form dimensions differ");
  PointGeometry g;
  g.n = n;
  g.a = metric.at(p);
  g.a_inv = checked_inverse(g.a);
  g.gamma = christoffel(metric, p);
  g.b = oneform.at(p);
  g.b_up = g.a_inv * g.b;
  g.bsq = g.b.dot(g.b_up);

  const Eigen::MatrixXd db = oneform.jacobian_at(p);
  g.nabla_b.resize(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = db(i, j);
      for (std::size_t k = 0; k < n; ++k) v -= g.b[k] * g.gamma(k, i, j);
      g.nabla_b(i, j) = v;
    }
  g.r = 0.5 * (g.nabla_b + g.nabla_b.transpose());
  g.s = 0.5 * (g.nabla_b - g.nabla_b.transpose());
  // Re-assembled so that r + s reproduces b_{i|j} bit for bit (differs from
  // the direct value by at most one rounding).
  g.nabla_b = g.r + g.s;
  g.r_vec = g.r.transpose() * g.b_up;
  g.s_vec = g.s.transpose() * g.b_up;
  g.s_up = g.a_inv * g.s_vec;
  return g;
}

BetaData beta_data(const PointGeometry& g, const TangentVector& y) {
  if (y.dim() != g.n) throw std::invalid_argument("direction dimension mismatch");
  const auto c = contract<double>(g, std::span<const double>(y.y.data(), g.n));
  auto vec = [](const std::vector<double>& v) {
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  BetaData d;
  d.nabla_b = g.nabla_b;
  d.r = g.r;
  d.s = g.s;
  d.r00 = c.r00;
  d.s0 = c.s0;
  d.r0 = c.r0;
  d.si0 = vec(c.si0);
  d.ri0 = vec(c.ri0);
  d.s_up0 = vec(c.s_up0);
  d.s_up = g.s_up;
  d.r_vec = g.r_vec;
  d.s_vec = g.s_vec;
  d.b_up = g.b_up;
  d.bsq = g.bsq;
  d.beta_val = c.beta;
  d.alpha_val = c.alpha;
  return d;
}

BetaData beta_data(const MetricField& metric, const OneFormField& oneform, const Point& p,
                   const TangentVector& y) {
  return beta_data(point_geometry(metric, oneform, p), y);
}

}  // namespace finslerkit
