#include "finslerkit/errors.hpp"
#include "finslerkit/fields.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace fkt;

namespace {

// a = diag(1, (x¹)²) on R².
MetricField polar_like() {
  auto x1 = var(2, 0);
  return MetricField({{cst(2, 1.0), PolyField(2)}, {PolyField(2), x1 * x1}});
}

}  // namespace

TEST_CASE("Euclidean Christoffel symbols vanish") {
  const auto gam = christoffel(MetricField::euclidean(3), Point{0.3, -1.0, 2.0});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) CHECK(gam(i, j, k) == 0.0);
}

TEST_CASE("hand-evaluated Christoffel symbols") {
  const auto gam = christoffel(polar_like(), Point{2.0, 0.0});
  CHECK(gam(1, 0, 1) == doctest::Approx(0.5));
  CHECK(gam(1, 1, 0) == doctest::Approx(0.5));
  CHECK(gam(0, 1, 1) == doctest::Approx(-2.0));
  CHECK(gam(0, 0, 0) == 0.0);
  CHECK(gam(0, 0, 1) == 0.0);
  CHECK(gam(1, 0, 0) == 0.0);
  CHECK(gam(1, 1, 1) == 0.0);
}

TEST_CASE("constant rescaling leaves Christoffel symbols unchanged") {
  const auto m = curved3();
  const auto scaled = m.conformal(cst(3, 4.0));
  const Point p{0.2, -0.3, 0.4};
  const auto a = christoffel(m, p), b = christoffel(scaled, p);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) CHECK(a(i, j, k) == doctest::Approx(b(i, j, k)).epsilon(1e-14));
}

TEST_CASE("Riemannian spray examples") {
  CHECK(riemann_spray(MetricField::euclidean(2), Point{1.0, 1.0}, TangentVector{1.0, 2.0}).G.norm() == 0.0);
  const auto g = riemann_spray(polar_like(), Point{2.0, 0.0}, TangentVector{0.0, 1.0}).G;
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(0.0));
  const auto g2 = riemann_spray(polar_like(), Point{2.0, 0.0}, TangentVector{0.0, 2.0}).G;
  CHECK(g2[0] == doctest::Approx(-4.0));
}

TEST_CASE("Christoffel symmetry and metric compatibility on random points") {
  const auto m = curved3();
  std::mt19937_64 rng(3);
  const DomainBox box({{-1, 1}, {-1, 1}, {-1, 1}});
  for (const auto& p : box.samples(100, rng)) {
    const auto gam = christoffel(m, p);
    const Eigen::MatrixXd a = m.at(p);
    for (std::size_t k = 0; k < 3; ++k) {
      const Eigen::MatrixXd da = m.derivative_at(k, p);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          CHECK(gam(i, j, k) == gam(i, k, j));
          double v = da(i, j);
          for (std::size_t l = 0; l < 3; ++l) v -= a(l, j) * gam(l, i, k) + a(i, l) * gam(l, j, k);
          CHECK(std::abs(v) <= 1e-12);
        }
    }
  }
}

TEST_CASE("Riemannian spray is quadratic in y") {
  const auto m = curved3();
  const Point p{0.1, 0.4, -0.2};
  const TangentVector y{0.3, -0.7, 0.5};
  const auto g = riemann_spray(m, p, y).G;
  for (double lam : {-1.0, 0.5, 3.0}) {
    const auto gl = riemann_spray(m, p, TangentVector(lam * y.y)).G;
    CHECK((gl - lam * lam * g).norm() <= 1e-12 * (1.0 + lam * lam * g.norm()));
  }
}

TEST_CASE("beta_data of a constant 1-form on Euclidean space") {
  const auto d = beta_data(MetricField::euclidean(3), constant_form({0.3, -0.4, 1.2}), Point{1, 2, 3},
                           TangentVector{0.5, 0.1, -0.2});
  CHECK(d.nabla_b.norm() == 0.0);
  CHECK(d.r.norm() == 0.0);
  CHECK(d.s.norm() == 0.0);
  CHECK(d.r00 == 0.0);
  CHECK(d.s0 == 0.0);
  CHECK(d.r0 == 0.0);
  CHECK(d.bsq == doctest::Approx(0.09 + 0.16 + 1.44));
}

TEST_CASE("beta_data hand example b = (x², 0)") {
  const OneFormField b({var(2, 1), PolyField(2)});
  const auto d = beta_data(MetricField::euclidean(2), b, Point{0.0, 3.0}, TangentVector{1.0, 1.0});
  CHECK(d.r(0, 1) == doctest::Approx(0.5));
  CHECK(d.s(0, 1) == doctest::Approx(0.5));
  CHECK(d.s(1, 0) == doctest::Approx(-0.5));
  CHECK(d.r00 == doctest::Approx(1.0));
  CHECK(d.s_vec[0] == doctest::Approx(0.0));
  CHECK(d.s_vec[1] == doctest::Approx(1.5));
  CHECK(d.s0 == doctest::Approx(1.5));
  CHECK(d.r0 == doctest::Approx(1.5));
  CHECK(d.bsq == doctest::Approx(9.0));
}

TEST_CASE("covariant split is exact and contractions are consistent") {
  const auto m = curved3();
  auto x1 = var(3, 0), x2 = var(3, 1), x3 = var(3, 2);
  const OneFormField b({cst(3, 0.2) + 0.1 * x2, 0.1 * (x1 * x3), 0.05 * (x2 * x2)});
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const DomainBox box({{-1, 1}, {-1, 1}, {-1, 1}});
  for (const auto& p : box.samples(50, rng)) {
    const TangentVector y{nd(rng), nd(rng), nd(rng)};
    const auto d = beta_data(m, b, p, y);
    CHECK((d.r + d.s - d.nabla_b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((d.r - d.r.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((d.s + d.s.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rel(d.r00, d.ri0.dot(y.y)) <= 1e-12);
    CHECK(rel(d.r00, y.y.dot(d.r * y.y)) <= 1e-12);
    CHECK(rel(d.s0, d.s_vec.dot(y.y)) <= 1e-12);
    CHECK(rel(d.r0, d.r_vec.dot(y.y)) <= 1e-12);
    CHECK(d.bsq >= 0.0);
  }
}

TEST_CASE("degenerate and indefinite metrics are rejected") {
  Eigen::MatrixXd sing(2, 2);
  sing << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(checked_inverse(sing), DegenerateMetricError);
  CHECK_FALSE(is_positive_definite(sing));

  auto x1 = var(2, 0);
  const MetricField m({{cst(2, 1.0) - x1 * x1, PolyField(2)}, {PolyField(2), cst(2, 1.0)}});
  const std::vector<Point> pts{Point{0.0, 0.0}, Point{2.0, 0.0}};
  CHECK_THROWS_AS(check_positive_definite(m, pts), DegenerateMetricError);
  CHECK_THROWS_AS(christoffel(m, Point{1.0, 0.0}), DegenerateMetricError);
}

TEST_CASE("asymmetric metric tables are refused") {
  auto x1 = var(2, 0);
  CHECK_THROWS_AS(MetricField({{cst(2, 1.0), x1}, {PolyField(2), cst(2, 1.0)}}), std::invalid_argument);
}
