#include "finslerkit/types.hpp"

namespace finslerkit {

std::vector<Point> DomainBox::grid(std::size_t per_axis) const {
  const std::size_t n = bounds_.size();
  std::vector<Point> out;
  if (n == 0 || per_axis == 0) return out;
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= per_axis;
  out.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t c = 0; c < total; ++c) {
    Eigen::VectorXd x(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto [lo, hi] = bounds_[k];
      const double t = per_axis == 1 ? 0.5 : static_cast<double>(idx[k]) / (per_axis - 1);
      x[k] = lo + t * (hi - lo);
    }
    out.emplace_back(std::move(x));
    for (std::size_t k = 0; k < n; ++k) {
      if (++idx[k] < per_axis) break;
      idx[k] = 0;
    }
  }
  return out;
}

Point DomainBox::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(bounds_.size());
  for (std::size_t k = 0; k < bounds_.size(); ++k) {
    const auto [lo, hi] = bounds_[k];
    x[k] = lo + unit(rng) * (hi - lo);
  }
  return Point(std::move(x));
}

std::vector<Point> DomainBox::samples(std::size_t count, std::mt19937_64& rng) const {
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample(rng));
  return out;
}

Point DomainBox::center() const {
  Eigen::VectorXd x(bounds_.size());
  for (std::size_t k = 0; k < bounds_.size(); ++k) x[k] = 0.5 * (bounds_[k].first + bounds_[k].second);
  return Point(std::move(x));
}

}  // namespace finslerkit
