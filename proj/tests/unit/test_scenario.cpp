#include "finslerkit/errors.hpp"
#include "finslerkit/scenario.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>

using namespace fkt;
using Json = nlohmann::ordered_json;

namespace {

Json term(std::vector<int> e, double c) { return Json{{"exponents", e}, {"coeff", c}}; }

// 2-d Euclidean Randers metric with a constant 1-form.
Json minimal() {
  return Json{{"dimension", 2},
              {"metric", Json::array({Json::array({Json::array({term({0, 0}, 1.0)}), Json::array()}),
                                      Json::array({Json::array(), Json::array({term({0, 0}, 1.0)})})})},
              {"oneform", Json::array({Json::array({term({0, 0}, 0.3)}), Json::array()})},
              {"family", {{"kind", "qab_plus"}, {"q", 1.0}}},
              {"domain_box", Json::array({Json::array({-1.0, 1.0}), Json::array({-1.0, 1.0})})}};
}

// Same idea in three dimensions with a barred Kropina metric.
Json minimal3(const std::string& kind, double q) {
  const auto one = Json::array({term({0, 0, 0}, 1.0)});
  const auto zero = Json::array();
  const auto eye = Json::array({Json::array({one, zero, zero}), Json::array({zero, one, zero}),
                                Json::array({zero, zero, one})});
  const double b = kind == "qab_minus" ? 2.0 : 0.3;
  return Json{{"dimension", 3},
              {"metric", eye},
              {"oneform", Json::array({Json::array({term({0, 0, 0}, b)}), zero, zero})},
              {"family", {{"kind", kind}, {"q", q}}},
              {"metric_bar", eye},
              {"oneform_bar", Json::array({Json::array({term({0, 0, 0}, 1.0)}), zero, zero})},
              {"family_bar", {{"kind", "kropina"}}},
              {"domain_box", Json::array({Json::array({-0.5, 0.5}), Json::array({-0.5, 0.5}),
                                          Json::array({-0.5, 0.5})})}};
}

std::string config_field(const Json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("the whole corpus loads") {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(FINSLERKIT_SCENARIOS)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto cfg = load_scenario(entry.path());
    CHECK(cfg.dimension >= 2);
    CHECK(cfg.name == entry.path().stem().string());
    ++count;
  }
  CHECK(count >= 15);
}

TEST_CASE("a minimal document") {
  const auto cfg = parse_scenario(minimal(), "mini");
  CHECK(cfg.dimension == 2);
  CHECK(cfg.F.family == PhiFamily::qab_plus(1.0));
  CHECK_FALSE(cfg.Fbar.has_value());
  CHECK(cfg.b_max == doctest::Approx(0.3));
  CHECK(cfg.tolerances.oracle == 1e-8);
  CHECK(cfg.probes.points == 10);
  CHECK(cfg.seed == 0);
  CHECK_FALSE(cfg.geodesic.has_value());
}

TEST_CASE("field paths in validation errors") {
  SUBCASE("asymmetric metric") {
    auto doc = minimal();
    doc["metric"][0][1] = Json::array({term({1, 0}, 0.1)});
    CHECK(config_field(doc) == "metric[0][1]");
  }
  SUBCASE("bad exponent") {
    auto doc = minimal();
    doc["oneform"][0][0]["exponents"] = Json::array({0, -1});
    CHECK(config_field(doc) == "oneform[0][0].exponents[1]");
    doc["oneform"][0][0]["exponents"] = Json::array({0, 0, 0});
    CHECK(config_field(doc) == "oneform[0][0].exponents");
  }
  SUBCASE("unknown top-level key") {
    auto doc = minimal();
    doc["colour"] = "blue";
    CHECK(config_field(doc) == "colour");
  }
  SUBCASE("missing field") {
    auto doc = minimal();
    doc.erase("family");
    CHECK(config_field(doc) == "family");
  }
  SUBCASE("unknown family") {
    auto doc = minimal();
    doc["family"]["kind"] = "matsumoto";
    CHECK(config_field(doc) == "family.kind");
  }
  SUBCASE("indefinite metric") {
    auto doc = minimal();
    doc["metric"][1][1] = Json::array({term({0, 0}, -1.0)});
    CHECK(config_field(doc) == "metric");
  }
  SUBCASE("zero Kropina form") {
    auto doc = minimal();
    doc["family"] = Json{{"kind", "kropina"}};
    doc["oneform"] = Json::array({Json::array(), Json::array()});
    CHECK(config_field(doc) == "oneform");
  }
  SUBCASE("minus family with a short 1-form") {
    auto doc = minimal();
    doc["family"] = Json{{"kind", "qab_minus"}, {"q", 2.0}};
    CHECK(config_field(doc) == "oneform");
  }
  SUBCASE("irregular square-root metric") {
    auto doc = minimal();
    doc["family"]["q"] = 2.0;
    doc["oneform"][0][0]["coeff"] = 1.2;
    CHECK(config_field(doc) == "family");
  }
  SUBCASE("tolerances") {
    auto doc = minimal();
    doc["tolerances"] = Json{{"oracle", 0.0}};
    CHECK(config_field(doc) == "tolerances.oracle");
    doc["tolerances"] = Json{{"douglas_accept", 1e-3}, {"douglas_reject", 1e-5}};
    CHECK(config_field(doc) == "tolerances.douglas_accept");
    doc["tolerances"] = Json{{"speed", 1.0}};
    CHECK(config_field(doc) == "tolerances.speed");
  }
  SUBCASE("geodesic block") {
    auto doc = minimal();
    doc["geodesic"] = Json{{"x0", {0.0, 0.0}}, {"y0", {1.0, 0.0}}, {"h", -0.1}, {"steps", 10}};
    CHECK(config_field(doc) == "geodesic.h");
  }
  SUBCASE("empty box interval") {
    auto doc = minimal();
    doc["domain_box"][1] = Json::array({1.0, -1.0});
    CHECK(config_field(doc) == "domain_box[1]");
  }
}

TEST_CASE("command-specific validation") {
  const auto ok = parse_scenario(minimal3("qab_plus", 2.0));
  CHECK_NOTHROW(validate_for(ok, "check-theorem1"));
  CHECK_THROWS_AS(validate_for(ok, "check-theorem2"), ConfigError);
  CHECK_THROWS_AS(validate_for(ok, "geodesic"), ConfigError);

  const auto randers = parse_scenario(minimal3("qab_plus", 1.0));
  try {
    validate_for(randers, "check-theorem1");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "family.q");
    CHECK(std::string(e.what()).find("q must differ from 1") != std::string::npos);
  }
  CHECK_THROWS_AS(validate_for(parse_scenario(minimal3("qab_minus", -1.0)), "check-theorem2"), ConfigError);
  CHECK_NOTHROW(validate_for(parse_scenario(minimal3("qab_minus", 2.0)), "check-theorem2"));
  CHECK_THROWS_AS(validate_for(parse_scenario(minimal()), "check-theorem1"), ConfigError);
}

TEST_CASE("syntax errors carry line and column") {
  const auto dir = std::filesystem::temp_directory_path() / "finslerkit_scenario_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "broken.json";
  {
    std::ofstream out(file);
    out << "{\n  \"dimension\": 2,\n  \"seed\": ,\n}\n";
  }
  try {
    load_scenario(file);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "config");
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_scenario(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("digest") {
  const auto d = scenario_digest(minimal());
  CHECK(d.size() == 16);
  for (char c : d) CHECK(std::isxdigit(static_cast<unsigned char>(c)));
  CHECK(scenario_digest(minimal()) == d);
  auto changed = minimal();
  changed["seed"] = 2;
  CHECK(scenario_digest(changed) != d);
}
