#pragma once

#include "config.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bgk {

struct Check {
  std::string name;
  std::optional<double> h;  // empty for checks across the h-sweep
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct RunResult {
  nlohmann::json summary;
  std::map<std::string, std::string> files;  // report file name -> contents
  std::vector<Check> checks;
  std::vector<std::string> errors;

  bool passed() const;
};

inline constexpr const char* kSchemaVersion = "bgk-spectra/1";

// Runs every requested experiment for every h; failures are recorded and the
// run continues.
RunResult run(const ExperimentConfig& config);

// Writes summary.json and the CSV files into dir, creating it if needed.
void emit_report(const RunResult& result, const std::string& dir);

}  // namespace bgk
