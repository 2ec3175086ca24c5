#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace finslerkit {

/// Coordinates x of a point of R^n.
struct Point {
  Eigen::VectorXd x;

  Point() = default;
  explicit Point(Eigen::VectorXd v) : x(std::move(v)) {}
  Point(std::initializer_list<double> v)
      : x(Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()))) {}
  std::size_t dim() const { return static_cast<std::size_t>(x.size()); }
};

/// Tangent vector y at some point; the argument of a Finsler norm.
struct TangentVector {
  Eigen::VectorXd y;

  TangentVector() = default;
  explicit TangentVector(Eigen::VectorXd v) : y(std::move(v)) {}
  TangentVector(std::initializer_list<double> v)
      : y(Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()))) {}
  std::size_t dim() const { return static_cast<std::size_t>(y.size()); }
};

/// Spray coefficients G^i at one (x, y).
struct SprayVector {
  Eigen::VectorXd G;
};

/// Axis-aligned box of coordinates, one [lo, hi] interval per axis.
class DomainBox {
 public:
  DomainBox() = default;
  explicit DomainBox(std::vector<std::pair<double, double>> bounds) : bounds_(std::move(bounds)) {}

  std::size_t dim() const { return bounds_.size(); }
  const std::vector<std::pair<double, double>>& bounds() const { return bounds_; }

  /// Tensor grid with `per_axis` nodes on each axis (endpoints included).
  std::vector<Point> grid(std::size_t per_axis) const;
  Point sample(std::mt19937_64& rng) const;
  std::vector<Point> samples(std::size_t count, std::mt19937_64& rng) const;
  Point center() const;

 private:
  std::vector<std::pair<double, double>> bounds_;
};

}  // namespace finslerkit
