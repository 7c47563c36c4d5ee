#pragma once

#include <map>
#include <string>

#include "degmix/assembly.hpp"
#include "degmix/mesh.hpp"

namespace degmix {

/// Refinement-study description. Level l uses n * 2^l squares per axis and
/// N * 2^l time steps.
struct ExperimentConfig {
  std::string case_name = "stokes";
  int n = 4;
  int levels = 3;
  double T = 1.0;
  int N = 4;
  Diagonal pattern = Diagonal::Right;
  Coefficients coefficients;
  bool probe_infsup = false;
  bool probe_garding = false;
  double xi = 1.0;
  std::string out_dir = "out";
  // Minimum fitted rate per CSV column.
  std::map<std::string, double> thresholds;
};

/// Accepts flat `key = value` lines (with `#` comments) or a JSON object.
/// Throws ConfigParse on syntax errors or invalid values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

void validate(const ExperimentConfig& config);

/// Rate thresholds applied when a config names none.
std::map<std::string, double> default_thresholds(const std::string& case_name);

}  // namespace degmix
