#include "finslerkit/report.hpp"

#include "finslerkit/douglas.hpp"
#include "finslerkit/errors.hpp"
#include "finslerkit/fields.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace finslerkit {

using Json = nlohmann::ordered_json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Info:
      return "info";
    case Verdict::Skipped:
      return "skipped";
  }
  return "fail";
}

bool Report::passed() const {
  return std::none_of(records.begin(), records.end(), [](const Record& r) { return r.verdict == Verdict::Fail; });
}

Format parse_format(std::string_view name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  throw ConfigError("format", "unknown format '" + std::string(name) + "' (expected json or csv)");
}

namespace {

struct Probe {
  Point p;
  TangentVector y;
};

struct Labeled {
  std::string label;
  const AlphaBetaMetric* ab;
};

std::vector<Labeled> metrics_of(const ScenarioConfig& cfg) {
  std::vector<Labeled> out{{"F", &cfg.F}};
  if (cfg.Fbar) out.push_back({"Fbar", &*cfg.Fbar});
  return out;
}

std::vector<const AlphaBetaMetric*> pointers(const std::vector<Labeled>& ms) {
  std::vector<const AlphaBetaMetric*> out;
  for (const auto& m : ms) out.push_back(m.ab);
  return out;
}

std::size_t per_point(const ScenarioConfig& cfg) {
  return cfg.probes.directions ? cfg.probes.directions : 4 * cfg.dimension;
}

/// Probe pairs admissible for every metric, at least `min_total` of them.
std::vector<Probe> draw_probes(const ScenarioConfig& cfg, const std::vector<const AlphaBetaMetric*>& ms,
                               std::mt19937_64& rng, std::size_t min_total) {
  const std::size_t points = cfg.probes.points;
  const std::size_t per = std::max(per_point(cfg), (min_total + points - 1) / points);
  std::vector<Probe> out;
  for (std::size_t k = 0; k < points; ++k) {
    const Point p = cfg.box.sample(rng);
    for (std::size_t d = 0; d < per; ++d) out.push_back({p, sample_common_direction(ms, p, rng)});
  }
  return out;
}

Record make(std::string name, double residual, double tol, bool pass, Json detail = Json::object()) {
  return {std::move(name), residual, tol, pass ? Verdict::Pass : Verdict::Fail, std::move(detail)};
}

Record info(std::string name, double residual, double tol, Json detail = Json::object()) {
  return {std::move(name), residual, tol, Verdict::Info, std::move(detail)};
}

/// Runs one check; module errors become a failed record.
void guarded(std::vector<Record>& out, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    out.push_back(make(name, std::numeric_limits<double>::quiet_NaN(), 0.0, false, Json{{"error", e.what()}}));
  }
}

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

double rel_unit(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

// ---------------------------------------------------------------- spray

void spray_checks(const ScenarioConfig& cfg, std::mt19937_64& rng, std::vector<Record>& out) {
  const auto ms = metrics_of(cfg);
  const auto probes = draw_probes(cfg, pointers(ms), rng, 100);
  const std::array<double, 3> lambdas{0.5, 2.0, 5.0};
  for (const auto& [label, ab] : ms) {
    guarded(out, "oracle_equivalence." + label, [&] {
      double worst = 0.0;
      for (const auto& pr : probes) {
        const auto oracle = spray_oracle(*ab, pr.p, pr.y).G;
        const auto closed = spray_closed(*ab, pr.p, pr.y).G;
        worst = std::max(worst, (closed - oracle).norm() / (1.0 + oracle.norm()));
      }
      out.push_back(make("oracle_equivalence." + label, worst, cfg.tolerances.oracle, worst <= cfg.tolerances.oracle,
                         Json{{"probes", probes.size()}, {"family", ab->family.tag()}}));
    });
    guarded(out, "homogeneity." + label, [&] {
      double worst = 0.0;
      for (const auto& pr : probes) {
        const auto g = spray_closed(*ab, pr.p, pr.y).G;
        const auto go = spray_oracle(*ab, pr.p, pr.y).G;
        for (double lam : lambdas) {
          const TangentVector ly(lam * pr.y.y);
          const double sc = 1.0 + lam * lam * g.norm();
          worst = std::max(worst, (spray_closed(*ab, pr.p, ly).G - lam * lam * g).norm() / sc);
          worst = std::max(worst, (spray_oracle(*ab, pr.p, ly).G - lam * lam * go).norm() / (1.0 + lam * lam * go.norm()));
        }
      }
      out.push_back(make("homogeneity." + label, worst, 1e-10, worst <= 1e-10, Json{{"lambdas", lambdas}}));
    });
    guarded(out, "family_consistency." + label, [&] {
      double worst = 0.0;
      try {
        for (const auto& pr : probes) {
          const auto fam = spray_family(*ab, pr.p, pr.y).G;
          const auto closed = spray_closed(*ab, pr.p, pr.y).G;
          worst = std::max(worst, (fam - closed).norm() / (1.0 + closed.norm()));
        }
      } catch (const PreconditionError& e) {
        out.push_back({"family_consistency." + label, 0.0, cfg.tolerances.oracle, Verdict::Skipped,
                       Json{{"reason", e.what()}}});
        return;
      } catch (const UnsupportedError& e) {
        out.push_back({"family_consistency." + label, 0.0, cfg.tolerances.oracle, Verdict::Skipped,
                       Json{{"reason", e.what()}}});
        return;
      }
      out.push_back(make("family_consistency." + label, worst, cfg.tolerances.oracle, worst <= cfg.tolerances.oracle));
    });
  }
}

// ---------------------------------------------------------------- douglas

bool expect_douglas(const ScenarioConfig& cfg, const std::string& label) {
  const auto& e = label == "F" ? cfg.expect.douglas : cfg.expect.douglas_bar;
  return e.value_or(true);
}

Record douglas_verdict(const ScenarioConfig& cfg, const std::string& name, const std::string& label, double residual,
                       Json detail) {
  const bool want = expect_douglas(cfg, label);
  const auto& t = cfg.tolerances;
  detail["expected"] = want ? "douglas" : "not_douglas";
  if (want) return make(name, residual, t.douglas_accept, residual <= t.douglas_accept, std::move(detail));
  return make(name, residual, t.douglas_reject, residual >= t.douglas_reject, std::move(detail));
}

void douglas_checks(const ScenarioConfig& cfg, std::mt19937_64& rng, std::vector<Record>& out) {
  const auto ms = metrics_of(cfg);
  const auto probes = draw_probes(cfg, pointers(ms), rng, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd c(cfg.dimension), u(cfg.dimension);
  for (std::size_t i = 0; i < cfg.dimension; ++i) c[i] = normal(rng);
  for (std::size_t i = 0; i < cfg.dimension; ++i) u[i] = normal(rng);

  std::vector<std::vector<DouglasTensor>> tensors(ms.size());
  for (std::size_t m = 0; m < ms.size(); ++m) {
    const auto& [label, ab] = ms[m];
    guarded(out, "douglas_tensor." + label, [&] {
      double worst = 0.0, sym = 0.0;
      for (const auto& pr : probes) {
        tensors[m].push_back(douglas_tensor(*ab, pr.p, pr.y));
        worst = std::max(worst, tensors[m].back().max_abs());
        sym = std::max(sym, tensors[m].back().symmetry_defect());
      }
      out.push_back(douglas_verdict(cfg, "douglas_tensor." + label, label, worst,
                                    Json{{"probes", probes.size()}, {"symmetry_defect", sym}}));
    });
    guarded(out, "projective_invariance." + label, [&] {
      double worst = 0.0;
      for (const auto& pr : probes) {
        const auto g = point_geometry(ab->metric, ab->oneform, pr.p);
        const auto base = douglas_tensor(*ab, pr.p, pr.y);
        auto planted = [&](auto P) {
          return douglas_tensor(
              [&](std::span<const Jet4> y) {
                auto G = closed_spray<Jet4>(g, ab->family, y);
                const Jet4 pv = P(y);
                for (std::size_t i = 0; i < G.size(); ++i) G[i] = G[i] + pv * y[i];
                return G;
              },
              pr.y);
        };
        const auto linear = planted([&](std::span<const Jet4> y) {
          Jet4 s(0.0);
          for (std::size_t i = 0; i < y.size(); ++i) s = s + c[i] * y[i];
          return s;
        });
        const auto nonlinear = planted([&](std::span<const Jet4> y) {
          Jet4 s(0.0), yy(0.0);
          for (std::size_t i = 0; i < y.size(); ++i) {
            s = s + u[i] * y[i];
            yy = yy + y[i] * y[i];
          }
          return s * s / sqrt(yy);
        });
        worst = std::max({worst, base.max_diff(linear), base.max_diff(nonlinear)});
      }
      out.push_back(make("projective_invariance." + label, worst, 1e-8, worst <= 1e-8,
                         Json{{"planted", "c.y and (u.y)^2/|y|"}}));
    });
  }
  if (cfg.Fbar && tensors[0].size() == probes.size() && tensors[1].size() == probes.size()) {
    guarded(out, "shared_douglas", [&] {
      double shared = 0.0, diff = 0.0;
      for (std::size_t k = 0; k < probes.size(); ++k) {
        shared = std::max(shared, shared_douglas_residual(cfg.F, *cfg.Fbar, probes[k].p, probes[k].y));
        diff = std::max(diff, tensors[0][k].max_diff(tensors[1][k]));
      }
      const bool agree = (shared <= 1e-8) == (diff <= 1e-8);
      out.push_back(make("shared_douglas", shared, 1e-8, agree,
                         Json{{"tensor_difference", diff}, {"same_douglas_tensor", shared <= 1e-8}}));
    });
  }
}

// ---------------------------------------------------------------- certify

Json certificate_json(const DouglasCertificate& c) {
  Json j{{"family", c.family_tag},
         {"verdict", to_string(c.verdict)},
         {"criterion", c.criterion},
         {"warning", c.warning},
         {"max_s", c.max_s}};
  if (!c.tau.empty()) {
    double tmax = 0.0;
    for (double t : c.tau) tmax = std::max(tmax, std::abs(t));
    j["tau"] = c.tau;
    j["tau_max_abs"] = tmax;
  }
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

DouglasTolerances douglas_tol(const ScenarioConfig& cfg) {
  return {cfg.tolerances.douglas_accept, cfg.tolerances.douglas_reject};
}

void certify_checks(const ScenarioConfig& cfg, std::mt19937_64& rng, std::vector<Record>& out) {
  const auto samples = cfg.box.samples(std::max<std::size_t>(20, 3 * cfg.probes.points), rng);
  for (const auto& [label, ab] : metrics_of(cfg)) {
    guarded(out, "certificate." + label, [&] {
      if (ab->family.kind == PhiKind::GenericPower) {
        out.push_back({"certificate." + label, 0.0, cfg.tolerances.douglas_accept, Verdict::Skipped,
                       Json{{"reason", "no algebraic Douglas criterion for a generic polynomial phi"}}});
        return;
      }
      const auto cert = douglas_certificate(*ab, samples, douglas_tol(cfg));
      out.push_back(douglas_verdict(cfg, "certificate." + label, label, cert.residual, certificate_json(cert)));
    });
  }
}

// ---------------------------------------------------------------- theorems

TheoremOptions theorem_options(const ScenarioConfig& cfg) {
  TheoremOptions o;
  o.points = cfg.probes.points;
  o.directions = cfg.probes.directions;
  o.fit_tolerance = cfg.tolerances.projective_fit;
  o.spray_tolerance = cfg.tolerances.spray_projective;
  o.douglas = douglas_tol(cfg);
  return o;
}

Json report_json(const ProjectiveReport& r) {
  Json theta = Json::array();
  for (const auto& t : r.theta_fit) theta.push_back(vec_json(t));
  Json pts = Json::array();
  for (const auto& p : r.points) pts.push_back(vec_json(p.x));
  Json cor{{"closedness", r.consequences.closedness},
           {"kropina_condition", r.consequences.kropina_condition},
           {"holds", r.consequences.holds},
           {"berwald", r.consequences.berwald}};
  if (r.consequences.berwald) cor["tau"] = r.consequences.tau;
  return Json{{"relation", r.relation},
              {"is_projective", r.is_projective},
              {"douglas_ok", r.douglas_ok},
              {"fit_ok", r.fit_ok},
              {"points", pts},
              {"theta", theta},
              {"probes_drawn", r.probes_drawn},
              {"probes_skipped", r.probes_skipped},
              {"collinearity_angle", r.collinearity_angle},
              {"consequences", cor}};
}

// Geodesics of F and F̄ from shared initial data, compared as point sets
// over unit coordinate arc length.
std::pair<double, Json> shared_geodesics(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  const std::array<const AlphaBetaMetric*, 2> both{&cfg.F, &*cfg.Fbar};
  const Eigen::VectorXd centre = cfg.box.center().x;
  constexpr double h = 0.005;
  constexpr std::size_t steps = 600;
  double worst = 0.0;
  Json runs = Json::array();
  for (int k = 0; k < 5; ++k) {
    const Point p(centre + 0.25 * (cfg.box.sample(rng).x - centre));
    const auto y = sample_common_direction(both, p, rng);
    const auto a = geodesic(cfg.F, p, y, h, steps);
    const auto b = geodesic(*cfg.Fbar, p, y, h, steps);
    const auto ta = truncate_arc_length(a, 1.0);
    const auto tb = truncate_arc_length(b, 1.0);
    const double d = compare_paths(ta, tb);
    worst = std::max(worst, d);
    runs.push_back(Json{{"x0", vec_json(p.x)},
                        {"y0", vec_json(y.y)},
                        {"distance", d},
                        {"failed", a.failed || b.failed}});
    if (a.failed || b.failed) worst = std::numeric_limits<double>::infinity();
  }
  return {worst, runs};
}

void theorem_checks(Relation rel, const ScenarioConfig& cfg, std::uint64_t seed, std::vector<Record>& out) {
  const auto opts = theorem_options(cfg);
  const bool want = cfg.expect.projective.value_or(true);
  auto check = [&](const TheoremOptions& o) {
    std::mt19937_64 rng(seed);
    return rel == Relation::Theorem1 ? theorem1_check(cfg.F, *cfg.Fbar, cfg.box, rng, o)
                                     : theorem2_check(cfg.F, *cfg.Fbar, cfg.box, rng, o);
  };
  const auto rep = check(opts);

  auto cert_record = [&](const std::string& name, const DouglasCertificate& c) {
    const double tol = cfg.tolerances.douglas_accept;
    if (!want) return info(name, c.residual, tol, certificate_json(c));
    return make(name, c.residual, tol, c.verdict == DouglasVerdict::Douglas, certificate_json(c));
  };
  out.push_back(cert_record("certificate.F", rep.douglas_F));
  out.push_back(cert_record("certificate.Fbar", rep.douglas_Fbar));
  if (want)
    out.push_back(make("relation_fit", rep.max_residual, opts.fit_tolerance, rep.fit_ok));
  else
    out.push_back(info("relation_fit", rep.max_residual, opts.fit_tolerance));

  Json detail = report_json(rep);
  detail["expected"] = want;
  out.push_back(make("projectively_related", rep.max_residual, opts.fit_tolerance, rep.is_projective == want,
                     std::move(detail)));

  if (rep.is_projective) {
    out.push_back(make("spray_round_trip", rep.max_spray_residual, cfg.tolerances.spray_projective,
                       rep.max_spray_residual <= cfg.tolerances.spray_projective,
                       Json{{"fresh_probes", rep.P_samples.size()}}));
    guarded(out, "geodesic_paths", [&] {
      std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
      auto [worst, runs] = shared_geodesics(cfg, rng);
      out.push_back(make("geodesic_paths", worst, cfg.tolerances.paths, worst <= cfg.tolerances.paths,
                         Json{{"arc_length", 1.0}, {"runs", std::move(runs)}}));
    });
  } else {
    out.push_back(info("spray_round_trip", rep.max_spray_residual, cfg.tolerances.spray_projective));
  }

  if (cfg.expect.ablation) {
    auto off = opts;
    off.include_correction = false;
    const auto without = check(off);
    const double ratio = without.max_residual / rep.max_residual;
    Json d{{"with_correction", rep.max_residual}, {"without_correction", without.max_residual}};
    if (*cfg.expect.ablation)
      out.push_back(make("correction_ablation", ratio, 10.0, ratio >= 10.0, std::move(d)));
    else
      out.push_back(info("correction_ablation", ratio, 10.0, std::move(d)));
  }
}

// ---------------------------------------------------------------- geodesic

void geodesic_checks(const ScenarioConfig& cfg, Report& report) {
  const auto& g = *cfg.geodesic;
  auto& out = report.records;
  guarded(out, "geodesic_drift", [&] {
    auto path = geodesic(cfg.F, g.x0, g.y0, g.h, g.steps);
    const bool ok = !path.failed && path.max_drift <= cfg.tolerances.geodesic_drift;
    Json d{{"steps", path.size() - 1}, {"h", g.h}};
    if (path.failed) d["failure"] = path.failure;
    out.push_back(make("geodesic_drift", path.max_drift, cfg.tolerances.geodesic_drift, ok, std::move(d)));
    report.path = std::move(path);
  });
  guarded(out, "convergence_order", [&] {
    constexpr std::size_t base = 20;
    const double horizon = g.h * static_cast<double>(g.steps);
    const auto st = convergence_order(cfg.F, g.x0, g.y0, horizon / base, base);
    if (std::max(st.e1, st.e2) < 1e-12) {
      // Straight lines are integrated exactly; the ratio is roundoff noise.
      out.push_back({"convergence_order", st.order, 0.3, Verdict::Skipped,
                     Json{{"e1", st.e1}, {"e2", st.e2}, {"reason", "discretisation error at roundoff level"}}});
      return;
    }
    out.push_back(make("convergence_order", st.order, 0.3, st.order >= 3.7 && st.order <= 4.3,
                       Json{{"e1", st.e1}, {"e2", st.e2}, {"steps", {base, 2 * base, 4 * base}}}));
  });
}

// ---------------------------------------------------------------- identities

void factor_checks(std::mt19937_64& rng, std::vector<Record>& out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_q = [&] {
    double q;
    do q = -3.0 + 6.0 * unit(rng);
    while (std::abs(q - 1.0) < 0.05);
    return q;
  };
  auto draw_family_s = [&](PhiFamily& fam, double& s) {
    switch (static_cast<int>(3.0 * unit(rng))) {
      case 0:
        fam = PhiFamily::qab_plus(draw_q());
        s = -0.9 + 1.8 * unit(rng);
        break;
      case 1:
        fam = PhiFamily::qab_minus(draw_q());
        s = 1.05 + 2.0 * unit(rng);
        break;
      default:
        fam = PhiFamily::kropina();
        s = 0.05 + 3.0 * unit(rng);
        break;
    }
  };

  guarded(out, "closed_form_factors", [&] {
    double worst = 0.0;
    std::size_t used = 0, skipped = 0;
    while (used < 1000) {
      PhiFamily fam;
      double s = 0.0;
      draw_family_s(fam, s);
      const double bsq = s * s + 2.0 * unit(rng);
      GeometryFactors gen, cf;
      try {
        gen = geometry_factors(fam, s, bsq);
        cf = closed_form_factors(fam, s, bsq);
      } catch (const FinslerError&) {
        ++skipped;
        continue;
      }
      // Ill-conditioned draws (Δ or φ − sφ' nearly zero) say nothing about the formulas.
      const auto j = phi_jet(fam, s);
      if (std::abs(gen.Delta) < 1e-4 || std::abs(j.phi - s * j.dphi) < 1e-4 * std::abs(j.phi)) {
        ++skipped;
        continue;
      }
      ++used;
      for (auto m : {&GeometryFactors::Q, &GeometryFactors::dQ, &GeometryFactors::d2Q, &GeometryFactors::Delta,
                     &GeometryFactors::Theta, &GeometryFactors::Psi, &GeometryFactors::dPsi})
        worst = std::max(worst, rel_unit(gen.*m, cf.*m));
    }
    out.push_back(make("closed_form_factors", worst, 1e-10, worst <= 1e-10,
                       Json{{"draws", used}, {"skipped", skipped}}));
  });

  guarded(out, "q_jet_finite_difference", [&] {
    double w1 = 0.0, w2 = 0.0, worst_s = 0.0;
    std::string worst_tag;
    std::size_t used = 0;
    constexpr double h = 1e-6;  // small enough for draws near the pole of Q
    while (used < 200) {
      PhiFamily fam;
      double s = 0.0;
      draw_family_s(fam, s);
      try {
        const auto j = phi_jet(fam, s);
        if (std::abs(j.phi - s * j.dphi) < 0.2 * std::abs(j.phi)) continue;
        const auto q0 = q_jet(fam, s), qp = q_jet(fam, s + h), qm = q_jet(fam, s - h);
        const double e1 = rel_unit(q0.dQ, (qp.Q - qm.Q) / (2.0 * h));
        const double e2 = rel_unit(q0.d2Q, (qp.dQ - qm.dQ) / (2.0 * h));
        if (e1 / 1e-7 > w1 / 1e-7 || e2 / 1e-5 > w2 / 1e-5) {
          worst_tag = fam.tag();
          worst_s = s;
        }
        w1 = std::max(w1, e1);
        w2 = std::max(w2, e2);
        ++used;
      } catch (const FinslerError&) {
      }
    }
    out.push_back(make("q_jet_finite_difference", std::max(w1 / 1e-7, w2 / 1e-5), 1.0, w1 <= 1e-7 && w2 <= 1e-5,
                       Json{{"dQ", w1}, {"d2Q", w2}, {"draws", used}, {"worst", {{"family", worst_tag}, {"s", worst_s}}}}));
  });

  guarded(out, "randers_q_constant", [&] {
    const std::array<double, 3> ss{-0.3, 0.1, 0.6};
    double spread1 = 0.0, min_spread = std::numeric_limits<double>::infinity();
    for (double s : ss) spread1 = std::max(spread1, std::abs(q_jet(PhiFamily::qab_plus(1.0), s).Q - 1.0));
    for (double q : {2.0, 3.0, -1.0, 0.5}) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (double s : ss) {
        const double r = q_jet(PhiFamily::qab_plus(q), s).Q / s;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      min_spread = std::min(min_spread, hi - lo);
    }
    out.push_back(make("randers_q_constant", spread1, 1e-14, spread1 <= 1e-14 && min_spread > 1e-3,
                       Json{{"min_spread_Q_over_s", min_spread}}));
  });
}

void field_checks(const ScenarioConfig& cfg, std::mt19937_64& rng, std::vector<Record>& out) {
  const auto ms = metrics_of(cfg);
  const auto probes = draw_probes(cfg, pointers(ms), rng, 100);
  for (const auto& [label, ab] : ms) {
    guarded(out, "christoffel." + label, [&] {
      double sym = 0.0, compat = 0.0;
      const std::size_t n = cfg.dimension;
      for (const auto& pr : probes) {
        const auto gam = christoffel(ab->metric, pr.p);
        const Eigen::MatrixXd a = ab->metric.at(pr.p);
        for (std::size_t k = 0; k < n; ++k) {
          const Eigen::MatrixXd da = ab->metric.derivative_at(k, pr.p);
          const double scale = 1.0 + da.cwiseAbs().maxCoeff();
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
              sym = std::max(sym, std::abs(gam(i, j, k) - gam(i, k, j)));
              double v = da(i, j);
              for (std::size_t l = 0; l < n; ++l) v -= a(l, j) * gam(l, i, k) + a(i, l) * gam(l, j, k);
              compat = std::max(compat, std::abs(v) / scale);
            }
        }
      }
      const double worst = std::max(sym, compat);
      out.push_back(make("christoffel." + label, worst, 1e-12, worst <= 1e-12,
                         Json{{"symmetry", sym}, {"metric_compatibility", compat}}));
    });
    guarded(out, "beta_data." + label, [&] {
      double split = 0.0, contr = 0.0;
      for (const auto& pr : probes) {
        const auto d = beta_data(ab->metric, ab->oneform, pr.p, pr.y);
        split = std::max({split, (d.r + d.s - d.nabla_b).cwiseAbs().maxCoeff(),
                          (d.r - d.r.transpose()).cwiseAbs().maxCoeff(),
                          (d.s + d.s.transpose()).cwiseAbs().maxCoeff()});
        const auto& y = pr.y.y;
        contr = std::max({contr, rel_unit(d.r00, d.ri0.dot(y)), rel_unit(d.s0, d.s_vec.dot(y)),
                          rel_unit(d.r0, d.r_vec.dot(y)), rel_unit(d.r00, y.dot(d.r * y))});
      }
      out.push_back(make("beta_data." + label, std::max(split, contr), 1e-12, split == 0.0 && contr <= 1e-12,
                         Json{{"split_exact", split == 0.0}, {"contractions", contr}}));
    });
    guarded(out, "riemann_homogeneity." + label, [&] {
      double worst = 0.0;
      for (const auto& pr : probes) {
        const auto g = riemann_spray(ab->metric, pr.p, pr.y).G;
        for (double lam : {-1.0, 0.5, 3.0}) {
          const auto gl = riemann_spray(ab->metric, pr.p, TangentVector(lam * pr.y.y)).G;
          worst = std::max(worst, (gl - lam * lam * g).norm() / (1.0 + lam * lam * g.norm()));
        }
      }
      out.push_back(make("riemann_homogeneity." + label, worst, 1e-12, worst <= 1e-12));
    });
    guarded(out, "source_divergence." + label, [&] {
      // T_div against the jet divergence of T.
      double worst = 0.0;
      for (const auto& pr : probes) {
        const auto g = point_geometry(ab->metric, ab->oneform, pr.p);
        const std::size_t n = g.n;
        double div = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
          std::vector<double> e(n, 0.0);
          e[m] = 1.0;
          const std::array<std::vector<double>, 1> dirs{e};
          const auto yj = seeded_vector<Jet1>(std::span<const double>(pr.y.y.data(), n), dirs);
          div += coefficient(source_T<Jet1>(g, ab->family, std::span<const Jet1>(yj))[m], 1);
        }
        const double closed = source_div<double>(g, ab->family, std::span<const double>(pr.y.y.data(), n));
        worst = std::max(worst, rel_unit(div, closed));
      }
      out.push_back(make("source_divergence." + label, worst, 1e-10, worst <= 1e-10));
    });
  }
}

void identity_checks(const ScenarioConfig& cfg, std::uint64_t seed, std::vector<Record>& out) {
  {
    std::mt19937_64 rng(seed);
    factor_checks(rng, out);
  }
  for (const auto& [label, ab] : metrics_of(cfg)) {
    const auto& reg = label == "F" ? cfg.regularity : *cfg.regularity_bar;
    out.push_back(make("regularity." + label, reg.worst_margin, 0.0, reg.ok,
                       Json{{"family", ab->family.tag()},
                            {"b_max", label == "F" ? cfg.b_max : *cfg.b_max_bar},
                            {"violations", reg.violations.size()}}));
  }
  {
    std::mt19937_64 rng(seed + 1);
    field_checks(cfg, rng, out);
  }
  {
    std::mt19937_64 rng(seed + 2);
    spray_checks(cfg, rng, out);
  }
}

}  // namespace

Report run(std::string_view command, const ScenarioConfig& cfg, const RunOptions& opts) {
  if (std::find(std::begin(kCommands), std::end(kCommands), command) == std::end(kCommands))
    throw ConfigError("command", "unknown command '" + std::string(command) + "'");
  validate_for(cfg, command);
  const auto start = std::chrono::steady_clock::now();

  Report report;
  report.command = command;
  report.scenario = cfg.name;
  report.digest = scenario_digest(cfg.source);
  report.seed = opts.seed.value_or(cfg.seed);
  std::mt19937_64 rng(report.seed);

  if (command == "spray") {
    spray_checks(cfg, rng, report.records);
  } else if (command == "douglas") {
    douglas_checks(cfg, rng, report.records);
  } else if (command == "certify") {
    certify_checks(cfg, rng, report.records);
  } else if (command == "check-theorem1") {
    theorem_checks(Relation::Theorem1, cfg, report.seed, report.records);
  } else if (command == "check-theorem2") {
    theorem_checks(Relation::Theorem2, cfg, report.seed, report.records);
  } else if (command == "geodesic") {
    geodesic_checks(cfg, report);
  } else {
    identity_checks(cfg, report.seed, report.records);
  }

  if (opts.timing)
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Json to_json(const Report& report) {
  Json records = Json::array();
  for (const auto& r : report.records)
    records.push_back(Json{{"name", r.name},
                           {"residual", r.residual},
                           {"tolerance", r.tolerance},
                           {"verdict", to_string(r.verdict)},
                           {"detail", r.detail}});
  Json j{{"command", report.command},
         {"scenario", report.scenario},
         {"digest", report.digest},
         {"seed", report.seed},
         {"passed", report.passed()},
         {"records", records}};
  if (report.path) {
    const auto& p = *report.path;
    Json samples = Json::array();
    for (std::size_t k = 0; k < p.size(); ++k)
      samples.push_back(Json{{"t", p.t[k]}, {"x", vec_json(p.x[k])}, {"v", vec_json(p.v[k])}});
    j["path"] = Json{{"metric", p.metric_tag}, {"failed", p.failed}, {"max_drift", p.max_drift}, {"samples", samples}};
  }
  if (report.seconds) j["timing_seconds"] = *report.seconds;
  return j;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void emit(const Report& report, Format format, std::ostream& out) {
  if (format == Format::Json) {
    out << to_json(report).dump(2) << '\n';
    return;
  }
  if (report.command == "geodesic" && report.path) {
    const auto& p = *report.path;
    const std::size_t n = p.dimension();
    out << 't';
    for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
    for (std::size_t i = 1; i <= n; ++i) out << ",v" << i;
    out << '\n';
    for (std::size_t k = 0; k < p.size(); ++k) {
      out << fmt(p.t[k]);
      for (std::size_t i = 0; i < n; ++i) out << ',' << fmt(p.x[k][static_cast<Eigen::Index>(i)]);
      for (std::size_t i = 0; i < n; ++i) out << ',' << fmt(p.v[k][static_cast<Eigen::Index>(i)]);
      out << '\n';
    }
    return;
  }
  out << "name,residual,tolerance,verdict\n";
  for (const auto& r : report.records)
    out << r.name << ',' << fmt(r.residual) << ',' << fmt(r.tolerance) << ',' << to_string(r.verdict) << '\n';
}

}  // namespace finslerkit
