#include "finslerkit/scenario.hpp"

#include "finslerkit/errors.hpp"
#include "finslerkit/fields.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace finslerkit {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) { throw ConfigError(field, msg); }

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "must be finite");
  return d;
}

std::size_t count(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

PolyField poly(const Json& v, std::size_t n, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a list of {exponents, coeff} terms");
  PolyField f(n);
  for (std::size_t t = 0; t < v.size(); ++t) {
    const std::string tp = index(path, t);
    const auto& term = v[t];
    const auto& ex = require(term, "exponents", tp);
    if (!ex.is_array() || ex.size() != n)
      fail(join(tp, "exponents"), "expected " + std::to_string(n) + " integers");
    Exponent e(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (!ex[k].is_number_integer() || ex[k].get<int>() < 0)
        fail(index(join(tp, "exponents"), k), "expected a non-negative integer");
      e[k] = ex[k].get<int>();
    }
    f.add_term(e, number(require(term, "coeff", tp), join(tp, "coeff")));
  }
  return f;
}

MetricField metric(const Json& v, std::size_t n, const std::string& path) {
  if (!v.is_array() || v.size() != n) fail(path, "expected an " + std::to_string(n) + "x" + std::to_string(n) + " table");
  std::vector<std::vector<PolyField>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].is_array() || v[i].size() != n) fail(index(path, i), "expected " + std::to_string(n) + " entries");
    std::vector<PolyField> row;
    for (std::size_t j = 0; j < n; ++j) row.push_back(poly(v[i][j], n, index(index(path, i), j)));
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(rows[i][j] == rows[j][i]))
        fail(index(index(path, i), j), "metric is not symmetric (differs from entry [" + std::to_string(j) + "][" +
                                           std::to_string(i) + "])");
  return MetricField(std::move(rows));
}

OneFormField oneform(const Json& v, std::size_t n, const std::string& path) {
  if (!v.is_array() || v.size() != n) fail(path, "expected " + std::to_string(n) + " components");
  std::vector<PolyField> comps;
  for (std::size_t i = 0; i < n; ++i) comps.push_back(poly(v[i], n, index(path, i)));
  return OneFormField(std::move(comps));
}

PhiFamily family(const Json& v, const std::string& path) {
  const auto& kind = require(v, "kind", path);
  if (!kind.is_string()) fail(join(path, "kind"), "expected a string");
  const auto k = kind.get<std::string>();
  auto q = [&] { return number(require(v, "q", path), join(path, "q")); };
  if (k == "qab_plus") return PhiFamily::qab_plus(q());
  if (k == "qab_minus") return PhiFamily::qab_minus(q());
  if (k == "kropina") return PhiFamily::kropina();
  if (k == "generic_power") {
    const auto& c = require(v, "coeffs", path);
    if (!c.is_array() || c.empty()) fail(join(path, "coeffs"), "expected a nonempty list of numbers");
    std::vector<double> coeffs;
    for (std::size_t i = 0; i < c.size(); ++i) coeffs.push_back(number(c[i], index(join(path, "coeffs"), i)));
    return PhiFamily::generic_power(std::move(coeffs));
  }
  fail(join(path, "kind"), "unknown family '" + k + "' (expected qab_plus, qab_minus, kropina or generic_power)");
}

Eigen::VectorXd vec(const Json& v, std::size_t n, const std::string& path) {
  if (!v.is_array() || v.size() != n) fail(path, "expected " + std::to_string(n) + " numbers");
  Eigen::VectorXd out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = number(v[i], index(path, i));
  return out;
}

// Builds (α, β, φ), checks positive definiteness on the box grid and the
// regularity of φ for the sampled range of ‖β‖_α.
AlphaBetaMetric metric_triple(const Json& doc, const std::string& suffix, std::size_t n, const DomainBox& box,
                              double& b_max, RegularityReport& reg) {
  const std::string mk = "metric" + suffix, bk = "oneform" + suffix, fk = "family" + suffix;
  AlphaBetaMetric ab{metric(require(doc, mk, ""), n, mk), oneform(require(doc, bk, ""), n, bk),
                     family(require(doc, fk, ""), fk)};
  const auto grid = box.grid(5);
  try {
    check_positive_definite(ab.metric, grid);
  } catch (const DegenerateMetricError& e) {
    fail(mk, e.what());
  }
  if (ab.family.kind == PhiKind::Kropina && ab.oneform.is_identically_zero())
    fail(bk, "a Kropina 1-form must not vanish identically");
  const auto [lo, hi] = beta_norm_range(ab, box);
  b_max = hi;
  if (ab.family.kind == PhiKind::QabMinus && !(lo > 1.0)) {
    std::ostringstream msg;
    msg << "qab_minus needs ‖β‖_α > 1 on the whole box (the cone β > α is empty otherwise); min sampled = " << lo;
    fail(bk, msg.str());
  }
  reg = regularity_check(ab.family, b_max);
  if (!reg.ok) {
    std::ostringstream msg;
    msg << "regularity check failed for b_max = " << b_max << ": " << reg.violations.size()
        << " violating s values, worst margin " << reg.worst_margin;
    if (!reg.note.empty()) msg << " (" << reg.note << ")";
    fail(fk, msg.str());
  }
  return ab;
}

const std::set<std::string> kKnownKeys{"name",        "description", "dimension",  "metric",   "oneform",
                                       "family",      "metric_bar",  "oneform_bar", "family_bar", "domain_box",
                                       "tolerances",  "seed",        "probes",     "geodesic", "expect"};

}  // namespace

std::pair<double, double> beta_norm_range(const AlphaBetaMetric& ab, const DomainBox& box) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& p : box.grid(5)) {
    const Eigen::VectorXd b = ab.oneform.at(p);
    const double norm = std::sqrt(b.dot(checked_inverse(ab.metric.at(p)) * b));
    lo = std::min(lo, norm);
    hi = std::max(hi, norm);
  }
  return {lo, hi};
}

ScenarioConfig parse_scenario(const Json& doc, std::string name) {
  if (!doc.is_object()) fail("", "scenario must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (!kKnownKeys.contains(key)) fail(key, "unknown field");

  ScenarioConfig cfg;
  cfg.source = doc;
  cfg.name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : std::move(name);

  const auto& dim = require(doc, "dimension", "");
  if (!dim.is_number_integer() || dim.get<long long>() < 2) fail("dimension", "must be an integer ≥ 2");
  const std::size_t n = dim.get<std::size_t>();
  cfg.dimension = n;

  const auto& box = require(doc, "domain_box", "");
  if (!box.is_array() || box.size() != n) fail("domain_box", "expected " + std::to_string(n) + " [lo, hi] pairs");
  std::vector<std::pair<double, double>> bounds;
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = index("domain_box", k);
    if (!box[k].is_array() || box[k].size() != 2) fail(p, "expected [lo, hi]");
    const double lo = number(box[k][0], index(p, 0)), hi = number(box[k][1], index(p, 1));
    if (!(lo <= hi)) fail(p, "empty interval (lo > hi)");
    bounds.emplace_back(lo, hi);
  }
  cfg.box = DomainBox(std::move(bounds));

  if (doc.contains("tolerances")) {
    const auto& t = doc["tolerances"];
    if (!t.is_object()) fail("tolerances", "expected an object");
    const std::pair<const char*, double Tolerances::*> named[] = {
        {"oracle", &Tolerances::oracle},
        {"douglas_accept", &Tolerances::douglas_accept},
        {"douglas_reject", &Tolerances::douglas_reject},
        {"projective_fit", &Tolerances::projective_fit},
        {"geodesic_drift", &Tolerances::geodesic_drift},
        {"spray_projective", &Tolerances::spray_projective},
        {"paths", &Tolerances::paths}};
    for (const auto& [key, val] : t.items()) {
      const auto it = std::find_if(std::begin(named), std::end(named), [&](const auto& e) { return key == e.first; });
      if (it == std::end(named)) fail(join("tolerances", key), "unknown tolerance");
      const double v = number(val, join("tolerances", key));
      if (!(v > 0.0)) fail(join("tolerances", key), "tolerances must be positive");
      cfg.tolerances.*(it->second) = v;
    }
    if (!(cfg.tolerances.douglas_accept <= cfg.tolerances.douglas_reject))
      fail("tolerances.douglas_accept", "must not exceed douglas_reject");
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("probes")) {
    const auto& p = doc["probes"];
    if (!p.is_object()) fail("probes", "expected an object");
    for (const auto& [key, val] : p.items()) {
      if (key == "points") {
        cfg.probes.points = count(val, "probes.points");
        if (cfg.probes.points == 0) fail("probes.points", "must be positive");
      } else if (key == "directions") {
        cfg.probes.directions = count(val, "probes.directions");
      } else {
        fail(join("probes", key), "unknown field");
      }
    }
  }

  cfg.F = metric_triple(doc, "", n, cfg.box, cfg.b_max, cfg.regularity);
  const bool any_bar = doc.contains("metric_bar") || doc.contains("oneform_bar") || doc.contains("family_bar");
  if (any_bar) {
    double bb = 0.0;
    RegularityReport rb;
    cfg.Fbar = metric_triple(doc, "_bar", n, cfg.box, bb, rb);
    cfg.b_max_bar = bb;
    cfg.regularity_bar = rb;
  }

  if (doc.contains("geodesic")) {
    const auto& g = doc["geodesic"];
    GeodesicSpec spec;
    spec.x0 = Point(vec(require(g, "x0", "geodesic"), n, "geodesic.x0"));
    spec.y0 = TangentVector(vec(require(g, "y0", "geodesic"), n, "geodesic.y0"));
    spec.h = number(require(g, "h", "geodesic"), "geodesic.h");
    if (!(spec.h > 0.0)) fail("geodesic.h", "step must be positive");
    spec.steps = count(require(g, "steps", "geodesic"), "geodesic.steps");
    if (spec.steps == 0) fail("geodesic.steps", "must be positive");
    if (!admissible(cfg.F, spec.x0, spec.y0)) fail("geodesic.y0", "initial direction is outside the admissible cone");
    cfg.geodesic = spec;
  }

  if (doc.contains("expect")) {
    const auto& e = doc["expect"];
    if (!e.is_object()) fail("expect", "expected an object");
    for (const auto& [key, val] : e.items()) {
      if (!val.is_boolean()) fail(join("expect", key), "expected true or false");
      const bool b = val.get<bool>();
      if (key == "douglas") cfg.expect.douglas = b;
      else if (key == "douglas_bar") cfg.expect.douglas_bar = b;
      else if (key == "projective") cfg.expect.projective = b;
      else if (key == "ablation") cfg.expect.ablation = b;
      else fail(join("expect", key), "unknown expectation");
    }
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << "parse error at line " << line << ", column " << col << ": " << e.what();
    throw ConfigError("config", msg.str());
  }
  return parse_scenario(doc, path.stem().string());
}

void validate_for(const ScenarioConfig& cfg, std::string_view command) {
  const bool t1 = command == "check-theorem1", t2 = command == "check-theorem2";
  if (t1 || t2) {
    if (cfg.dimension < 3) fail("dimension", "the relation checkers need dimension ≥ 3");
    if (!cfg.Fbar) fail("metric_bar", "the relation checkers need a barred Kropina metric");
    const auto& f = cfg.F.family;
    if (t1 && f.kind != PhiKind::QabPlus) fail("family.kind", "check-theorem1 needs qab_plus");
    if (t2 && f.kind != PhiKind::QabMinus) fail("family.kind", "check-theorem2 needs qab_minus");
    if (cfg.Fbar->family.kind != PhiKind::Kropina) fail("family_bar.kind", "the barred metric must be kropina");
    if (std::abs(f.q - 1.0) < 1e-3) fail("family.q", "q must differ from 1");
    if (t2 && std::abs(f.q + 1.0) < 1e-3) fail("family.q", "q must differ from -1");
  }
  if (command == "geodesic" && !cfg.geodesic) fail("geodesic", "the geodesic command needs a geodesic block");
}

std::string scenario_digest(const Json& doc) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace finslerkit
