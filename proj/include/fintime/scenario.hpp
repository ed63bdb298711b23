#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fintime/process.hpp"
#include "fintime/results.hpp"
#include "fintime/timeset.hpp"

namespace fintime {

struct AnalysisSpec {
  std::string type;  // spectrum | radius | cones | domains | eta | m_curve |
                     // ftle_field | oracle_check
  Json params;       // canonical parameters, defaults filled in
};

struct ScenarioConfig {
  SystemSpec system;
  TimeSet timeset = TimeSet::finite({0.0, 1.0});
  NormSpec norm = NormSpec::euclidean();
  std::uint64_t seed = detail::kDefaultSeed;
  double step = 0.0;
  std::string output_dir = "out";
  std::vector<AnalysisSpec> analyses;
  Json canonical;  // defaults-filled document; serialization and equality key
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

// JSON with // and /* */ comments; parse failures carry the location, all
// semantic problems are collected into one ValidationError rather than
// stopping at the first.
ScenarioConfig parse_scenario(const std::string& text);

// Canonical document bytes; parse_scenario(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

// Comment stripping used by the parser; exposed for tests.  Replaces comment
// bodies with spaces so parse-error locations still line up.
std::string strip_comments(const std::string& text);

struct AnalysisOutcome {
  std::size_t index = 0;
  std::string type;
  bool ok = false;
  std::string error;
  std::vector<std::string> files;  // paths written, relative to the output dir
};

struct RunReport {
  std::vector<AnalysisOutcome> analyses;
  std::string output_dir;
  std::string manifest_path;
  bool all_ok = false;
};

// Runs the analyses in declared order, one versioned result document per
// analysis plus side CSV/SVG files, then a run manifest.  Per-analysis
// failures are captured in the report; earlier results stay on disk.
RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_override = "",
                       std::optional<std::uint64_t> seed_override = {});

}  // namespace fintime
