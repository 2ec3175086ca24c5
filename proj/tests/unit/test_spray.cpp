#include "finslerkit/errors.hpp"
#include "finslerkit/spray.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fkt;

namespace {

OneFormField wavy_form() {
  auto x1 = var(3, 0), x2 = var(3, 1), x3 = var(3, 2);
  return OneFormField({cst(3, 0.2) + 0.1 * x2, 0.1 * (x1 * x3), 0.05 * (x2 * x2)});
}

// Exact 1-form d(0.3 x1 + 0.1 x1 x2 + 0.05 x3²).
OneFormField exact_form() {
  auto x1 = var(3, 0), x2 = var(3, 1), x3 = var(3, 2);
  return OneFormField({cst(3, 0.3) + 0.1 * x2, 0.1 * x1, 0.1 * x3});
}

double max_rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
}

}  // namespace

TEST_CASE("norm examples") {
  CHECK(finsler_norm(euclid_metric({1.0, 0.0}, PhiFamily::kropina()), Point{0, 0}, TangentVector{1, 1}) ==
        doctest::Approx(2.0));
  CHECK(finsler_norm(euclid_metric({1.0, 0.0}, PhiFamily::qab_plus(1.0)), Point{0, 0}, TangentVector{1, 1}) ==
        doctest::Approx(std::sqrt(2.0) + 1.0));
  CHECK(finsler_norm(euclid_metric({0.5, 0.0}, PhiFamily::qab_plus(2.0)), Point{0, 0}, TangentVector{0, 2}) ==
        doctest::Approx(2.0));
}

TEST_CASE("norm is positively homogeneous") {
  const AlphaBetaMetric ab{curved3(), wavy_form(), PhiFamily::qab_plus(2.0)};
  const Point p{0.3, -0.2, 0.5};
  const TangentVector y{0.4, 0.7, -0.1};
  const double f = finsler_norm(ab, p, y);
  for (double lam : {0.1, 2.0, 7.5}) CHECK(finsler_norm(ab, p, TangentVector(lam * y.y)) == doctest::Approx(lam * f));
}

TEST_CASE("fundamental tensor") {
  SUBCASE("Euler identity g(y, y) = F²") {
    const AlphaBetaMetric ab{curved3(), wavy_form(), PhiFamily::qab_plus(3.0)};
    const Point p{0.1, 0.2, 0.3};
    const TangentVector y{1.0, -0.5, 0.25};
    const auto g = fundamental_tensor(ab, p, y);
    const double f = finsler_norm(ab, p, y);
    CHECK(y.y.dot(g.g * y.y) == doctest::Approx(f * f).epsilon(1e-12));
    CHECK(g.positive_definite);
  }
  SUBCASE("Randers closed form") {
    const Eigen::Vector2d b(0.3, -0.2);
    const auto ab = euclid_metric({b[0], b[1]}, PhiFamily::qab_plus(1.0));
    const Eigen::Vector2d y(0.6, 1.1);
    const double alpha = y.norm();
    const double f = alpha + b.dot(y);
    const Eigen::Vector2d yl = y / alpha;
    const Eigen::Matrix2d expect =
        (f / alpha) * (Eigen::Matrix2d::Identity() - yl * yl.transpose()) + (yl + b) * (yl + b).transpose();
    const auto g = fundamental_tensor(ab, Point{0, 0}, TangentVector(Eigen::VectorXd(y)));
    CHECK((g.g - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("b = 0 reduces to a") {
    const AlphaBetaMetric ab{curved3(), constant_form({0, 0, 0}), PhiFamily::qab_plus(2.0)};
    const Point p{0.5, 0.5, -0.5};
    const auto g = fundamental_tensor(ab, p, TangentVector{0.2, 0.3, 0.4});
    CHECK((g.g - ab.metric.at(p)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("indefinite g is flagged") {
    // (1+s)^q with q large and s close to the edge of regularity.
    const auto ab = euclid_metric({0.95, 0.0}, PhiFamily::qab_plus(3.0));
    const auto g = fundamental_tensor(ab, Point{0, 0}, TangentVector{1.0, 0.05});
    CHECK_FALSE(g.positive_definite);
  }
}

TEST_CASE("flat data gives a vanishing spray") {
  const auto ab = euclid_metric({0.2, 0.1, -0.3}, PhiFamily::qab_plus(2.0));
  CHECK(spray_oracle(ab, Point{1, 2, 3}, TangentVector{0.3, 0.4, 0.5}).G.cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(spray_closed(ab, Point{1, 2, 3}, TangentVector{0.3, 0.4, 0.5}).G.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("b = 0 recovers the Riemannian spray") {
  const AlphaBetaMetric ab{curved3(), constant_form({0, 0, 0}), PhiFamily::qab_plus(2.0)};
  const Point p{0.2, -0.4, 0.6};
  const TangentVector y{0.5, 0.5, -1.0};
  const auto r = riemann_spray(ab.metric, p, y).G;
  CHECK(max_rel(spray_closed(ab, p, y).G, r) <= 1e-14);
  CHECK(max_rel(spray_oracle(ab, p, y).G, r) <= 1e-12);
}

TEST_CASE("closed form matches the definition on curved data") {
  std::mt19937_64 rng(21);
  const DomainBox box({{-0.8, 0.8}, {-0.8, 0.8}, {-0.8, 0.8}});
  for (const auto& fam : {PhiFamily::qab_plus(1.0), PhiFamily::qab_plus(2.0), PhiFamily::qab_plus(-1.5),
                          PhiFamily::kropina(), PhiFamily::generic_power({1.0, 0.3, 0.1})}) {
    const AlphaBetaMetric ab{curved3(), wavy_form(), fam};
    for (const auto& p : box.samples(20, rng)) {
      const auto y = sample_direction(ab, p, rng);
      CHECK(max_rel(spray_closed(ab, p, y).G, spray_oracle(ab, p, y).G) <= 1e-8);
    }
  }
  // The minus family needs β > α, hence a long b.
  auto x2 = var(3, 1);
  const AlphaBetaMetric minus{curved3(), OneFormField({cst(3, 3.0) + 0.2 * x2, cst(3, 0.4), PolyField(3)}),
                              PhiFamily::qab_minus(2.0)};
  for (const auto& p : box.samples(20, rng)) {
    const auto y = sample_direction(minus, p, rng, 0.05);
    CHECK(s_value(minus, p, y) > 1.0);
    CHECK(max_rel(spray_closed(minus, p, y).G, spray_oracle(minus, p, y).G) <= 1e-8);
  }
}

TEST_CASE("spray is positively homogeneous of degree two") {
  const AlphaBetaMetric ab{curved3(), wavy_form(), PhiFamily::qab_plus(2.0)};
  const Point p{0.1, 0.1, 0.1};
  const TangentVector y{0.3, 0.2, 0.9};
  const auto g = spray_closed(ab, p, y).G;
  for (double lam : {0.5, 2.0, 5.0})
    CHECK(max_rel(spray_closed(ab, p, TangentVector(lam * y.y)).G, lam * lam * g) <= 1e-12);
}

TEST_CASE("family specializations") {
  std::mt19937_64 rng(4);
  const DomainBox box({{-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}});
  SUBCASE("closed β on a curved metric") {
    for (const auto& fam : {PhiFamily::qab_plus(2.0), PhiFamily::qab_plus(3.0), PhiFamily::qab_plus(1.0)}) {
      const AlphaBetaMetric ab{curved3(), exact_form(), fam};
      for (const auto& p : box.samples(10, rng)) {
        const auto y = sample_direction(ab, p, rng);
        CHECK(max_rel(spray_family(ab, p, y).G, spray_oracle(ab, p, y).G) <= 1e-8);
      }
    }
  }
  SUBCASE("Kropina with b ∧ db = 0") {
    auto x2 = var(3, 1), x3 = var(3, 2);
    const AlphaBetaMetric ab{MetricField::euclidean(3),
                             OneFormField({cst(3, 1.0) + 0.2 * x2 + 0.1 * (x3 * x3), PolyField(3), PolyField(3)}),
                             PhiFamily::kropina()};
    for (const auto& p : box.samples(10, rng)) {
      CHECK(kropina_douglas_residual(point_geometry(ab.metric, ab.oneform, p)) <= 1e-14);
      const auto y = sample_direction(ab, p, rng);
      CHECK(max_rel(spray_family(ab, p, y).G, spray_oracle(ab, p, y).G) <= 1e-8);
    }
  }
  SUBCASE("violated hypotheses are refused") {
    const AlphaBetaMetric ab{curved3(), wavy_form(), PhiFamily::qab_plus(3.0)};
    const Point p{0.2, 0.3, 0.1};
    CHECK(closedness_residual(point_geometry(ab.metric, ab.oneform, p)) > 1e-3);
    CHECK_THROWS_AS(spray_family(ab, p, TangentVector{1, 0, 0}), PreconditionError);

    auto x3 = var(3, 2);
    const AlphaBetaMetric kr{MetricField::euclidean(3), OneFormField({cst(3, 1.0), x3, PolyField(3)}),
                             PhiFamily::kropina()};
    const Point q{0.0, 0.0, 0.5};
    CHECK(kropina_douglas_residual(point_geometry(kr.metric, kr.oneform, q)) > 1e-3);
    CHECK_THROWS_AS(spray_family(kr, q, TangentVector{1, 0, 0}), PreconditionError);
  }
}

TEST_CASE("evaluation errors") {
  const auto kr = euclid_metric({1.0, 0.0}, PhiFamily::kropina());
  CHECK_THROWS_AS(finsler_norm(kr, Point{0, 0}, TangentVector{0, 0}), DegenerateDirectionError);
  CHECK_THROWS_AS(finsler_norm(kr, Point{0, 0}, TangentVector{-1, 1}), SingularSError);
  CHECK_THROWS_AS(spray_closed(kr, Point{0, 0}, TangentVector{0, 1}), SingularSError);
  CHECK_FALSE(admissible(kr, Point{0, 0}, TangentVector{-1, 1}));
  CHECK(admissible(kr, Point{0, 0}, TangentVector{1, 1}, 0.5));
  CHECK_FALSE(admissible(kr, Point{0, 0}, TangentVector{0.1, 1}, 0.5));
}

TEST_CASE("sampled directions are admissible unit vectors") {
  const auto kr = euclid_metric({0.0, 1.0, 0.0}, PhiFamily::kropina());
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto y = sample_direction(kr, Point{0, 0, 0}, rng);
    CHECK(y.y.norm() == doctest::Approx(1.0));
    CHECK(y.y[1] > 1e-2);
  }
  // A QabMinus metric with |b| < 1 has no admissible direction at all.
  const auto none = euclid_metric({0.5, 0.0, 0.0}, PhiFamily::qab_minus(2.0));
  CHECK_THROWS_AS(sample_direction(none, Point{0, 0, 0}, rng, 1e-2, 200), ConfigError);
}
