#pragma once

// Projective relatedness G^i = Ḡ^i + P y^i: pointwise residuals, the
// (q,α,β)-vs-Kropina relation checkers, RK4 geodesics and path comparison.

#include "finslerkit/douglas.hpp"
#include "finslerkit/spray.hpp"
#include "finslerkit/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace finslerkit {

struct ProjectiveFit {
  double P = 0.0;
  double residual = 0.0;
};

/// P = ⟨G−Ḡ, y⟩/⟨y, y⟩, residual = ‖(G−Ḡ) − Py‖ / (1 + ‖G−Ḡ‖).
ProjectiveFit projective_residual(const SprayVector& G, const SprayVector& Gbar, const TangentVector& y);

struct ThetaFit {
  Eigen::VectorXd theta;
  std::vector<double> residuals;  // ‖Z − θ(y) y‖ / (1 + ‖Z‖) per probe
  double max_residual = 0.0;
};

/// Least-squares θ with Z(y) ≈ (θ·y) y over the probes.
ThetaFit fit_theta(std::span<const TangentVector> ys, std::span<const Eigen::VectorXd> Z);

enum class Relation { Theorem1, Theorem2 };

/// Relation vector Z^i(y) = (G_α − Ḡ_ᾱ) + C^i − (ᾱ² s̄^i + r̄_00 b̄^i)/(2b̄²), where
/// C^i is the family correction term along b^i. Empty when the correction's
/// denominator is below `degenerate` (relative to its homogeneity scale).
std::optional<Eigen::VectorXd> relation_vector(Relation rel, const PointGeometry& g, const PointGeometry& gbar,
                                               double q, const TangentVector& y, bool include_correction,
                                               double degenerate = 1e-10);

struct TheoremOptions {
  std::size_t points = 8;        // probe points x
  std::size_t directions = 0;    // y-probes per point; 0 means 4n (never below 2n)
  std::size_t fresh_probes = 50;
  std::size_t certificate_samples = 30;
  double fit_tolerance = 1e-7;
  double spray_tolerance = 1e-7;
  double degenerate = 1e-10;
  double margin = 1e-2;          // distance kept from the conic-domain edges
  double max_skip_fraction = 0.1;
  bool include_correction = true;
  DouglasTolerances douglas;
};

struct ProbeRecord {
  Point p;
  TangentVector y;
  double P = 0.0;
  double residual = 0.0;
};

struct ConsequenceRecord {
  double closedness = 0.0;       // max |s_ij| of F
  double kropina_condition = 0.0;  // Kropina Douglas-condition residual of F̄
  bool holds = false;            // relation fit, s_ij = 0 and the Kropina condition
  bool berwald = false;          // F is the q = 2 member
  std::vector<double> tau;       // Berwald: fitted τ per certificate sample
};

struct ProjectiveReport {
  std::string relation;
  bool is_projective = false;
  bool douglas_ok = false;
  bool fit_ok = false;
  DouglasCertificate douglas_F, douglas_Fbar;
  std::vector<Point> points;
  std::vector<Eigen::VectorXd> theta_fit;
  double max_residual = 0.0;
  std::size_t probes_drawn = 0;
  std::size_t probes_skipped = 0;
  std::vector<ProbeRecord> P_samples;  // fresh spray-level probes
  double max_spray_residual = 0.0;
  double collinearity_angle = 0.0;     // max angle between b and b̄ (radians)
  ConsequenceRecord consequences;
};

/// F = (α+β)^q/α^{q−1}, F̄ = ᾱ²/β̄. Needs n ≥ 3 and q ≠ 1.
ProjectiveReport theorem1_check(const AlphaBetaMetric& F, const AlphaBetaMetric& Fbar, const DomainBox& box,
                                std::mt19937_64& rng, const TheoremOptions& opts = {});
/// F = β^q/(β−α)^{q−1}, F̄ = ᾱ²/β̄. Needs n ≥ 3 and q ∉ {1, −1}.
ProjectiveReport theorem2_check(const AlphaBetaMetric& F, const AlphaBetaMetric& Fbar, const DomainBox& box,
                                std::mt19937_64& rng, const TheoremOptions& opts = {});

/// Direction admissible for every metric in `metrics`; redraws up to
/// `max_redraws` times, then throws ConfigError.
TangentVector sample_common_direction(std::span<const AlphaBetaMetric* const> metrics, const Point& p,
                                      std::mt19937_64& rng, double margin = 1e-2,
                                      std::size_t max_redraws = 10000);

struct GeodesicPath {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x, v;
  std::string metric_tag;
  bool failed = false;
  std::string failure;
  double max_drift = 0.0;  // max |F(x,ẋ)/F(x0,ẋ0) − 1|

  std::size_t size() const { return t.size(); }
  std::size_t dimension() const { return x.empty() ? 0 : static_cast<std::size_t>(x.front().size()); }
};

/// Classical RK4 on (ẋ, v̇) = (v, −2G(x, v)) with G from the closed form.
/// A spray failure truncates the path and sets `failed`.
GeodesicPath geodesic(const AlphaBetaMetric& ab, const Point& p0, const TangentVector& y0, double h,
                      std::size_t steps);

struct ConvergenceStudy {
  double e1 = 0.0, e2 = 0.0;  // |x_h − x_{h/2}|, |x_{h/2} − x_{h/4}| at the common endpoint
  double order = 0.0;         // log2(e1 / e2)
};

ConvergenceStudy convergence_order(const AlphaBetaMetric& ab, const Point& p0, const TangentVector& y0, double h,
                                   std::size_t steps);

/// Cuts the path at coordinate arc length `length`, interpolating the last sample.
GeodesicPath truncate_arc_length(const GeodesicPath& path, double length);

/// Symmetric point-to-polyline distance: max over samples of either path of
/// the distance to the other path's polyline.
double compare_paths(const GeodesicPath& a, const GeodesicPath& b);

}  // namespace finslerkit
