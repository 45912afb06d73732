#pragma once
// Experiment configuration: a flat "key = value" text file, '#' comments.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chanlab/fredholm.hpp"
#include "chanlab/harness.hpp"

namespace chanlab {

// Random: seeded random_stream; File: a stream container on the config grid.
enum class InitialData { Identity, Shear, Random, File };
enum class TrajectorySource { Analytic, Solver };

struct ExperimentConfig {
  std::string name = "experiment";
  int nx = 64, ny = 65;
  double height = 8.0;

  InitialData initial = InitialData::Shear;
  double amplitude = 1.0, decay = 1.0;  // phi(y) = amplitude * exp(-decay y)
  int initial_max_k = 3, initial_max_l = 4;  // random initial data
  std::filesystem::path initial_path;        // file initial data
  TrajectorySource source = TrajectorySource::Analytic;
  double horizon = 1.0;
  double dt = 0.01;         // solver step
  int intervals = 10;       // analytic records
  int record_every = 10;    // solver records

  double t = 1.0;           // operator time
  int quadrature_nodes = 11;
  std::vector<OperatorName> operators;
  int max_k = 8, max_l = 12;
  bool certificate = false;
  bool scan = false;
  double scan_t_max = 0.0;  // 0: horizon

  std::vector<HarnessTag> inequalities;
  int samples = 100;
  int calibration_samples = 100;
  std::map<HarnessTag, int> samples_per_tag;
  int harness_m = -1, harness_n = -1;

  int s = 2;
  double eps = 0.0;  // 0: eps_max / 2

  std::string output = "runs";
  std::uint64_t seed = 1;

  int samples_for(HarnessTag tag) const;
};

// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string to_string(InitialData v);
std::string to_string(TrajectorySource v);

}  // namespace chanlab
