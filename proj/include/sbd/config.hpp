#pragma once

// Run configuration: JSON with sections model, sampler, simulation,
// experiment and io. Every key is optional; unknown keys are rejected.

#include <json.hpp>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbd/experiments.hpp"

namespace sbd {

enum class ImageTrace { None, Window, All };

struct SamplerSettings {
  ChainConfig chain;
  int chains = 1;
  ImageTrace trace_image = ImageTrace::Window;
};

struct SimulationSettings {
  Index gen_factor = 10;
  std::optional<Index> exact_column;
  /// Central rows of the exact column written as image observations; all
  /// rows when unset.
  std::optional<Index> exact_rows;
  std::optional<double> sigma_c2, sigma_w2, zeta;
  std::uint64_t seed = 1;
};

struct ExperimentSettings {
  std::vector<Index> m_values{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
  std::vector<double> alpha_values{0.0, 1.0};
  std::vector<Index> mv_values{0, 2, 6, 12, 24, 36, 48, 72};
  std::vector<Index> mh_values{0, 6, 12};
  std::size_t post_burn_in = 45000;
  std::size_t max_lag = 1500;
};

struct IoSettings {
  std::filesystem::path data;       // observed data matrix
  std::filesystem::path image_obs;  // m x 3 matrix of (row, col, value)
  std::filesystem::path output = "out";
  bool binary = false;
};

struct RunConfig {
  LatticeSpec lattice;
  HyperParams hp;
  SamplerSettings sampler;
  SimulationSettings simulation;
  ExperimentSettings experiment;
  IoSettings io;
  nlohmann::json source;  // the parsed document

  /// FNV-1a of the canonical (sorted, compact) JSON text, as 16 hex digits.
  std::string hash() const;
  SimRecipe recipe() const;
  void override_seed(std::uint64_t seed);
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);
/// Relative io paths are resolved against the config file's directory.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace sbd
