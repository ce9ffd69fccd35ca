#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace anonplan::cli {

/// Parameters of one command invocation, echoed into every artifact it writes.
/// Values are kept as text so the echo is exactly what was parsed.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> params;

  /// Compact JSON: {"tool":"anonplan","version":...,"command":...,"params":{...}}.
  std::string to_json() const;
  /// "config: <json>", for comment lines in text artifacts.
  std::string comment() const;
};

/// Solution file "anonplan-weights/1". `timing` holds the only run-dependent fields.
struct WeightsFile {
  std::string method;
  std::string status;
  double objective = 0.0;
  std::size_t constraints = 0;
  std::size_t auxiliaries = 0;
  std::vector<std::string> labels;  ///< one per basis function
  std::vector<double> weights;
  double ve_seconds = 0.0;
  double lp_seconds = 0.0;
};

void write_weights(std::ostream& os, const WeightsFile& w, const RunConfig& config);
WeightsFile read_weights(std::istream& is);
WeightsFile load_weights(const std::filesystem::path& path);

}  // namespace anonplan::cli
