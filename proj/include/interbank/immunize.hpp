#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "interbank/network.hpp"
#include "interbank/random.hpp"

namespace interbank::immunize {

enum class Strategy { none, uniform, counteractive };
enum class CounteractiveMode { edge_betweenness, random };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view name);
std::string_view to_string(CounteractiveMode m);
CounteractiveMode mode_from_string(std::string_view name);

/// (first, second): second's return is built from first's in the sampler.
using BankPair = std::pair<BankId, BankId>;

struct PairAssignment {
  std::vector<BankPair> pairs;
  double rho = 0.0;  ///< returns within a pair have correlation -rho
};

struct PlanProvenance {
  std::uint64_t network_hash = 0;
  std::uint64_t seed = 0;
  std::string metric;
  /// Bank left without a partner by an odd leftover count (never immunized).
  std::optional<BankId> unpaired;
};

struct ImmunizationPlan {
  Strategy strategy = Strategy::none;
  std::string order_metric = "none";
  double fraction = 0.0;
  std::size_t n_banks = 0;
  std::vector<BankId> uniform_set;  ///< vaccination order, top first
  PairAssignment pairs;             ///< selection order, first pair first
  PlanProvenance provenance;
};

/// round(fraction * n); fraction must lie in [0, 1].
std::size_t immunized_count(std::size_t n_banks, double fraction);

ImmunizationPlan baseline_plan(const InterbankNetwork& g);

/// Full vaccination order for uniform immunization. `metric` is a centrality
/// metric name or "random" (uniform shuffle).
std::vector<BankId> uniform_order(const InterbankNetwork& g, std::string_view metric, Rng& rng);

ImmunizationPlan uniform_plan_from_order(const InterbankNetwork& g, std::span<const BankId> order,
                                         std::string_view metric, double fraction, std::uint64_t seed);

/// Top round(fraction * N) banks of the metric order hold the common asset.
/// The plan is a function of (g, metric, fraction, seed).
ImmunizationPlan uniform_plan(const InterbankNetwork& g, std::string_view metric, double fraction,
                              std::uint64_t seed);

struct CounteractiveOrder {
  std::vector<BankPair> pairs;
  std::optional<BankId> unpaired;
};

/// Greedy pairing: pick the maximal edge-betweenness edge of the residual
/// graph (random among ties; any residual edge in random mode), pair its
/// endpoints, delete both, repeat. Once no edge is left the remaining banks
/// are paired at random.
CounteractiveOrder counteractive_order(const InterbankNetwork& g, CounteractiveMode mode, Rng& rng);

ImmunizationPlan counteractive_plan_from_order(const InterbankNetwork& g, const CounteractiveOrder& order,
                                               CounteractiveMode mode, double fraction, double rho,
                                               std::uint64_t seed);

/// First round(fraction * N) / 2 pairs of counteractive_order.
ImmunizationPlan counteractive_plan(const InterbankNetwork& g, CounteractiveMode mode, double fraction,
                                    double rho, std::uint64_t seed);

/// Stream used for plan construction; independent of the fraction so that
/// plans at growing fractions are nested prefixes.
Rng plan_stream(std::uint64_t seed, Strategy strategy, std::string_view metric);

/// `#` header with strategy, metric, seed, fraction; then `rank,bank_id,partner_id`.
void write_plan_csv(std::ostream& out, const ImmunizationPlan& plan);

}  // namespace interbank::immunize
