#pragma once

// Scenario files: JSON documents describing the metric data, the domain box,
// tolerances and probe counts for one run of the toolkit.

#include "finslerkit/phi.hpp"
#include "finslerkit/spray.hpp"
#include "finslerkit/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace finslerkit {

struct Tolerances {
  double oracle = 1e-8;
  double douglas_accept = 1e-7;
  double douglas_reject = 1e-4;
  double projective_fit = 1e-7;
  double geodesic_drift = 1e-6;
  double spray_projective = 1e-7;
  double paths = 1e-4;
};

struct ProbeCounts {
  std::size_t points = 10;
  std::size_t directions = 0;  // 0: 4n
};

struct GeodesicSpec {
  Point x0;
  TangentVector y0;
  double h = 0.01;
  std::size_t steps = 100;
};

/// Optional expected outcomes, so negative instances can pass as scripted runs.
struct Expectations {
  std::optional<bool> douglas, douglas_bar, projective;
  std::optional<bool> ablation;  // true: gate on the correction-term ablation; false: report it only
};

struct ScenarioConfig {
  std::string name;
  std::size_t dimension = 0;
  AlphaBetaMetric F;
  std::optional<AlphaBetaMetric> Fbar;
  DomainBox box;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  ProbeCounts probes;
  std::optional<GeodesicSpec> geodesic;
  Expectations expect;
  double b_max = 0.0;
  std::optional<double> b_max_bar;
  RegularityReport regularity;
  std::optional<RegularityReport> regularity_bar;
  nlohmann::ordered_json source;  // the document as loaded, for the digest
};

/// Parses and validates a scenario. Throws ConfigError naming the field path.
ScenarioConfig parse_scenario(const nlohmann::ordered_json& doc, std::string name = {});
/// Reads a file; JSON syntax errors report line and column.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Command-specific checks (dimension ≥ 3 and q restrictions for the
/// relation checkers, presence of the barred metric, geodesic block).
void validate_for(const ScenarioConfig& cfg, std::string_view command);

/// 16-hex-digit FNV-1a hash of the canonical dump of the document.
std::string scenario_digest(const nlohmann::ordered_json& doc);

/// sup of ‖β‖_α over a 5-per-axis grid of the box.
std::pair<double, double> beta_norm_range(const AlphaBetaMetric& ab, const DomainBox& box);

}  // namespace finslerkit
