#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmdp/core.hpp"
#include "cmdp/pri.hpp"

namespace cmdp {

struct InstanceSpec {
  /// toy | synthetic | file | random | grid
  std::string kind = "synthetic";
  std::string path;  // file: CMDP document; grid: map file (empty = bundled map)
  bool renormalize = false;
  int S = 3, A = 3, H = 3, N = 1;  // random; H is also the grid horizon
  std::uint64_t seed = 0;          // random generator seed
  bool unique_solution = false;
  int duplicate_action = -1;       // >= 0 appends a copy of that action
};

struct ExperimentConfig {
  std::string name = "experiment";
  InstanceSpec instance;
  /// pri | tripleq | lp-solve
  std::string algorithm = "pri";
  PriParams pri;
  /// Triple-Q baseline length; zero matches the PRI schedule.
  std::int64_t tq_episodes = 0;
  std::vector<std::uint64_t> seeds = {0};
  int threads = 1;
  std::string out_dir = "out";
  int bucket = 0;      // aggregate bucket width; zero picks about 200 buckets
  int csv_stride = 1;  // write every k-th episode to the per-seed CSV
};

/// Unknown keys are rejected so that typos do not silently fall back to defaults.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Throws ConfigError on out-of-range values.
void validate_config(const ExperimentConfig& cfg);

TabularCmdp make_instance(const InstanceSpec& spec);

/// Episodes a PRI run uses when every phase runs to completion.
std::int64_t pri_schedule_length(const PriParams& params);

}  // namespace cmdp
