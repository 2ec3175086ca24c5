#pragma once

// Command dispatch over a scenario and report emission (JSON or CSV).

#include "finslerkit/projective.hpp"
#include "finslerkit/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace finslerkit {

enum class Verdict { Pass, Fail, Info, Skipped };

std::string to_string(Verdict v);

struct Record {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Fail;
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();
};

struct Report {
  std::string command;
  std::string scenario;
  std::string digest;
  std::uint64_t seed = 0;
  std::vector<Record> records;
  std::optional<GeodesicPath> path;
  std::optional<double> seconds;  // only with RunOptions::timing

  bool passed() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

inline constexpr std::string_view kCommands[] = {"spray",          "douglas",  "certify",          "check-theorem1",
                                                 "check-theorem2", "geodesic", "verify-identities"};

/// Runs one command. Module errors become failed records; ConfigError
/// propagates.
Report run(std::string_view command, const ScenarioConfig& cfg, const RunOptions& opts = {});

enum class Format { Json, Csv };

/// Throws ConfigError for anything but "json" or "csv".
Format parse_format(std::string_view name);

nlohmann::ordered_json to_json(const Report& report);
void emit(const Report& report, Format format, std::ostream& out);

}  // namespace finslerkit
