#include "finslerkit/errors.hpp"
#include "finslerkit/projective.hpp"
#include "finslerkit/scenario.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fkt;

namespace {

ProjectiveReport run_scenario(const std::string& name, Relation rel) {
  const auto cfg = load_scenario(scenario_path(name));
  std::mt19937_64 rng(cfg.seed);
  TheoremOptions opts;
  opts.points = cfg.probes.points;
  return rel == Relation::Theorem1 ? theorem1_check(cfg.F, *cfg.Fbar, cfg.box, rng, opts)
                                   : theorem2_check(cfg.F, *cfg.Fbar, cfg.box, rng, opts);
}

}  // namespace

TEST_CASE("projective residual examples") {
  const TangentVector y{1.0, 2.0};
  auto fit = projective_residual(SprayVector{Eigen::Vector2d(1.0, 2.0)}, SprayVector{Eigen::Vector2d::Zero()}, y);
  CHECK(fit.P == doctest::Approx(1.0));
  CHECK(fit.residual == doctest::Approx(0.0));
  fit = projective_residual(SprayVector{Eigen::Vector2d(-2.0, 1.0)}, SprayVector{Eigen::Vector2d::Zero()}, y);
  CHECK(fit.P == doctest::Approx(0.0));
  CHECK(fit.residual == doctest::Approx(std::sqrt(5.0) / (1.0 + std::sqrt(5.0))));
  CHECK_THROWS_AS(projective_residual(SprayVector{Eigen::Vector2d::Zero()}, SprayVector{Eigen::Vector2d::Zero()},
                                      TangentVector{0.0, 0.0}),
                  DegenerateDirectionError);
}

TEST_CASE("planted θ is recovered") {
  const Eigen::Vector3d theta(0.3, -0.2, 0.5);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  std::vector<TangentVector> ys;
  std::vector<Eigen::VectorXd> Z;
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d y(nd(rng), nd(rng), nd(rng));
    ys.emplace_back(Eigen::VectorXd(y));
    Z.emplace_back(theta.dot(y) * y);
  }
  const auto fit = fit_theta(ys, Z);
  CHECK((fit.theta - theta).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(fit.max_residual <= 1e-10);

  // A component orthogonal to y cannot be absorbed.
  Z[3] += Eigen::Vector3d(ys[3].y[1], -ys[3].y[0], 0.0);
  CHECK(fit_theta(ys, Z).max_residual > 1e-3);
}

TEST_CASE("planted nonlinear P is detected as projective") {
  // Ḡ = G + P y with P = (u·y)²/|y|, a non-linear 1-homogeneous P.
  const AlphaBetaMetric ab{curved3(), constant_form({0.1, 0.2, 0.0}), PhiFamily::qab_plus(2.0)};
  const Eigen::Vector3d u(0.4, -0.1, 0.3);
  std::mt19937_64 rng(6);
  const DomainBox box({{-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}});
  for (const auto& p : box.samples(10, rng)) {
    const auto y = sample_direction(ab, p, rng);
    const auto G = spray_closed(ab, p, y);
    const double P = std::pow(u.dot(y.y), 2) / y.y.norm();
    const SprayVector Gbar{G.G + P * y.y};
    const auto fit = projective_residual(Gbar, G, y);
    CHECK(fit.P == doctest::Approx(P));
    CHECK(fit.residual <= 1e-10);
  }
}

TEST_CASE("first relation") {
  SUBCASE("trivial") {
    const auto r = run_scenario("theorem1_trivial", Relation::Theorem1);
    CHECK(r.is_projective);
    CHECK(r.max_residual <= 1e-7);
  }
  SUBCASE("positive") {
    const auto r = run_scenario("theorem1_positive", Relation::Theorem1);
    CHECK(r.is_projective);
    CHECK(r.douglas_ok);
    CHECK(r.fit_ok);
    CHECK(r.max_spray_residual <= 1e-7);
    CHECK(r.P_samples.size() >= 50);
    CHECK(r.consequences.holds);
    CHECK(r.consequences.berwald);
    CHECK(r.collinearity_angle <= 1e-8);
  }
  SUBCASE("negative") {
    const auto r = run_scenario("theorem1_negative", Relation::Theorem1);
    CHECK_FALSE(r.is_projective);
    CHECK(r.max_residual > 1e-7);
  }
}

TEST_CASE("second relation") {
  SUBCASE("trivial") { CHECK(run_scenario("theorem2_trivial", Relation::Theorem2).is_projective); }
  SUBCASE("positive") {
    const auto r = run_scenario("theorem2_positive", Relation::Theorem2);
    CHECK(r.is_projective);
    CHECK(r.max_spray_residual <= 1e-7);
  }
  SUBCASE("negative") { CHECK_FALSE(run_scenario("theorem2_negative", Relation::Theorem2).is_projective); }
}

TEST_CASE("relation vector without the correction term") {
  const auto cfg = load_scenario(scenario_path("theorem2_positive"));
  std::mt19937_64 rng(cfg.seed);
  TheoremOptions opts;
  opts.include_correction = false;
  const auto without = theorem2_check(cfg.F, *cfg.Fbar, cfg.box, rng, opts);
  // The positive instance has r_00 = 0, so dropping the correction changes nothing there.
  CHECK(without.fit_ok);
}

TEST_CASE("degenerate correction denominators are reported as empty") {
  // q = −2 and b = 2e₁: the denominator vanishes where s³ + s² − 8 = 0.
  double s = 1.7;
  for (int i = 0; i < 60; ++i) s -= (s * s * s + s * s - 8.0) / (3.0 * s * s + 2.0 * s);
  const auto F = euclid_metric({2.0, 0.0, 0.0}, PhiFamily::qab_minus(-2.0));
  const auto Fbar = euclid_metric({1.0, 0.0, 0.0}, PhiFamily::kropina());
  const Point p{0, 0, 0};
  const auto g = point_geometry(F.metric, F.oneform, p);
  const auto gbar = point_geometry(Fbar.metric, Fbar.oneform, p);
  const TangentVector bad{s / 2.0, std::sqrt(1.0 - s * s / 4.0), 0.0};
  CHECK_FALSE(relation_vector(Relation::Theorem2, g, gbar, -2.0, bad, true).has_value());
  const TangentVector good{0.9, std::sqrt(1.0 - 0.81), 0.0};
  CHECK(relation_vector(Relation::Theorem2, g, gbar, -2.0, good, true).has_value());
}

TEST_CASE("relation checker preconditions") {
  std::mt19937_64 rng(1);
  const DomainBox box3({{-1, 1}, {-1, 1}, {-1, 1}});
  const auto kr = euclid_metric({1.0, 0.0, 0.0}, PhiFamily::kropina());
  CHECK_THROWS_AS(theorem1_check(euclid_metric({0.2, 0, 0}, PhiFamily::qab_plus(1.0)), kr, box3, rng),
                  PreconditionError);
  CHECK_THROWS_AS(theorem1_check(euclid_metric({0.2, 0, 0}, PhiFamily::qab_minus(2.0)), kr, box3, rng),
                  UnsupportedError);
  CHECK_THROWS_AS(theorem1_check(euclid_metric({0.2, 0, 0}, PhiFamily::qab_plus(2.0)),
                                 euclid_metric({0.2, 0, 0}, PhiFamily::qab_plus(2.0)), box3, rng),
                  UnsupportedError);
  CHECK_THROWS_AS(theorem2_check(euclid_metric({2.0, 0, 0}, PhiFamily::qab_minus(-1.0)), kr, box3, rng),
                  PreconditionError);
  const DomainBox box2({{-1, 1}, {-1, 1}});
  CHECK_THROWS_AS(theorem1_check(euclid_metric({0.2, 0}, PhiFamily::qab_plus(2.0)),
                                 euclid_metric({1.0, 0}, PhiFamily::kropina()), box2, rng),
                  PreconditionError);
}

TEST_CASE("common directions") {
  std::mt19937_64 rng(2);
  const auto a = euclid_metric({1.0, 0.0, 0.0}, PhiFamily::kropina());
  const auto b = euclid_metric({0.0, 1.0, 0.0}, PhiFamily::kropina());
  const AlphaBetaMetric* both[] = {&a, &b};
  for (int i = 0; i < 20; ++i) {
    const auto y = sample_common_direction(both, Point{0, 0, 0}, rng);
    CHECK(y.y[0] > 0.0);
    CHECK(y.y[1] > 0.0);
  }
  const auto opposite = euclid_metric({-1.0, 0.0, 0.0}, PhiFamily::kropina());
  const AlphaBetaMetric* disjoint[] = {&a, &opposite};
  CHECK_THROWS_AS(sample_common_direction(disjoint, Point{0, 0, 0}, rng, 1e-2, 500), ConfigError);
}

TEST_CASE("geodesics") {
  SUBCASE("straight lines in flat data") {
    const auto ab = euclid_metric({0.2, 0.1}, PhiFamily::qab_plus(1.0));
    const auto path = geodesic(ab, Point{0, 0}, TangentVector{1, 0}, 0.01, 100);
    REQUIRE(path.size() == 101);
    CHECK_FALSE(path.failed);
    CHECK(path.x.back()[0] == doctest::Approx(1.0));
    CHECK(std::abs(path.x.back()[1]) <= 1e-14);
    CHECK(path.max_drift <= 1e-14);
    CHECK(path.t.back() == doctest::Approx(1.0));
  }
  SUBCASE("norm is conserved along curved geodesics") {
    const AlphaBetaMetric ab{curved3(), constant_form({0.1, 0.1, 0.0}), PhiFamily::qab_plus(2.0)};
    const auto path = geodesic(ab, Point{0, 0, 0}, TangentVector{0.6, 0.3, 0.2}, 0.002, 500);
    CHECK_FALSE(path.failed);
    CHECK(path.max_drift <= 1e-6);
  }
  SUBCASE("fourth-order convergence") {
    const AlphaBetaMetric ab{curved3(), constant_form({0.1, 0.1, 0.0}), PhiFamily::qab_plus(2.0)};
    const auto c = convergence_order(ab, Point{0, 0, 0}, TangentVector{0.6, 0.3, 0.2}, 0.05, 20);
    CHECK(c.e1 > c.e2);
    CHECK(c.order >= 3.7);
    CHECK(c.order <= 4.3);
  }
  SUBCASE("a degenerating metric truncates the path") {
    auto x1 = var(2, 0);
    const AlphaBetaMetric ab{
        MetricField({{cst(2, 1.0) - x1 * x1, PolyField(2)}, {PolyField(2), cst(2, 1.0)}}),
        constant_form({0.0, 0.1}), PhiFamily::qab_plus(2.0)};
    const auto path = geodesic(ab, Point{0, 0}, TangentVector{1, 0}, 0.01, 400);
    CHECK(path.failed);
    CHECK_FALSE(path.failure.empty());
    CHECK(path.size() < 401);
    for (const auto& x : path.x) CHECK(std::abs(x[0]) < 1.0);
  }
  SUBCASE("arc-length truncation") {
    const auto ab = euclid_metric({0.0, 0.0}, PhiFamily::qab_plus(2.0));
    const auto path = geodesic(ab, Point{0, 0}, TangentVector{1, 0}, 0.03, 100);
    const auto cut = truncate_arc_length(path, 0.5);
    CHECK(cut.x.back()[0] == doctest::Approx(0.5));
    CHECK(cut.size() < path.size());
  }
}

TEST_CASE("path comparison") {
  const auto ab = euclid_metric({0.0, 0.0}, PhiFamily::qab_plus(2.0));
  const auto a = geodesic(ab, Point{0, 0}, TangentVector{1, 1}, 0.01, 100);
  CHECK(compare_paths(a, a) == 0.0);
  // Same trace at double speed.
  const auto b = geodesic(ab, Point{0, 0}, TangentVector{2, 2}, 0.01, 50);
  CHECK(compare_paths(a, b) <= 1e-12);
  const auto c = geodesic(ab, Point{0, 0}, TangentVector{1, 0}, 0.01, 100);
  CHECK(compare_paths(a, c) == doctest::Approx(1.0));
  CHECK_THROWS_AS(compare_paths(a, GeodesicPath{}), std::invalid_argument);
}
