#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "interbank/balance.hpp"
#include "interbank/graphgen.hpp"
#include "interbank/immunize.hpp"

namespace interbank::harness {

/// Either a stored edge list or generator parameters with their own seed.
struct NetworkSource {
  std::optional<std::string> path;  ///< as written in the config
  std::optional<graphgen::PowerLawParams> generate;
  std::uint64_t generate_seed = 1;

  bool operator==(const NetworkSource&) const;
};

struct StrategySpec {
  immunize::Strategy strategy = immunize::Strategy::none;
  /// Centrality metric or "random" for uniform; edge_betweenness/random for
  /// counteractive; "none" for the baseline.
  std::string order = "none";

  bool operator==(const StrategySpec&) const = default;
};

struct ExperimentConfig {
  NetworkSource network;
  balance::RiskParams risk;  ///< delta_s and family are taken from the grids
  double k_loss = 1.0;
  std::vector<StrategySpec> strategies;
  std::vector<double> fractions;
  std::vector<double> rhos;
  std::vector<double> delta_s;
  std::vector<balance::DistFamily> families;
  std::vector<double> chi;
  std::uint64_t n_trials = 100000;
  std::uint64_t master_seed = 1;

  /// Directory relative network paths are resolved against (not serialised).
  std::filesystem::path base_dir;

  /// Throws std::invalid_argument on empty grids, out-of-range values or
  /// unknown strategy/order names.
  void validate() const;

  std::filesystem::path network_path() const;

  bool operator==(const ExperimentConfig& other) const;
};

/// Throws std::invalid_argument on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

}  // namespace interbank::harness
