#pragma once

#include <filesystem>

#include "bounds.hpp"

namespace halo {

inline constexpr const char* kVersion = "0.1.0";

struct ProfileRequest {
  Method method = Method::Exact;
  int p = 1;
  int n_max = 1;
  int radius = -1;  // exact search; -1 means n_max - 1
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::uint64_t node_budget = 50000000;
};

// Checks p against the method (set methods compute p = 1, spectral p = 2)
// and the seed requirement of the annealer, then dispatches.
ProfileRun run_profile(const Group& g, const ProfileRequest& r);

// JSON object, or TOML-like "key = value" lines with '#' comments, strings
// in double quotes, numbers, true/false and one-line [a, b] arrays.
nlohmann::json parse_config(const std::string& text);

// Config schema:
//   group (string, required), method (exact|greedy|anneal|spectral, required),
//   n_max (int >= 1, required), p (1 for set methods, 2 for spectral),
//   seed (int, required for anneal), radius, workers, budget (ints),
//   bounds ("standard" or list of expressions or {name, expr, conditional}),
//   dilations (subset of [1, 2, 4]), plot (bool).
// Violations throw ContractViolation naming the field path.
struct ExperimentConfig {
  std::string group;
  ProfileRequest profile;
  std::vector<BoundSpec> bounds;
  std::vector<int> dilations{1};
  bool plot = true;
};
ExperimentConfig validate_config(const nlohmann::json& j);

struct ExperimentResult {
  std::filesystem::path dir;
  nlohmann::json manifest;
};

// Writes config copy, profile.csv, witnesses.json, bounds.csv/json when
// bounds are given, profile.svg when plotting, and manifest.json.
ExperimentResult run_experiment(const std::filesystem::path& config_file, const std::filesystem::path& out_dir);
ExperimentResult run_experiment_text(const std::string& config_text, const std::string& config_name,
                                     const std::filesystem::path& out_dir);

// Log-log line plot of profile values and fitted bounds (K = 1).
std::string profile_svg(const std::string& title, const std::vector<ProfilePoint>& points, const BoundReport& report);

nlohmann::json library_versions();

}  // namespace halo
