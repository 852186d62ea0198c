#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include "interbank/balance.hpp"
#include "interbank/cascade.hpp"
#include "interbank/config.hpp"
#include "interbank/immunize.hpp"
#include "interbank/metrics.hpp"
#include "interbank/network.hpp"

namespace interbank::harness {

struct GridPoint {
  immunize::Strategy strategy = immunize::Strategy::none;
  std::string order = "none";
  double fraction = 0.0;
  std::optional<double> rho;      ///< counteractive only
  std::optional<double> delta_s;  ///< uniform only
  balance::DistFamily family = balance::DistFamily::student_t;

  /// File-name-safe identifier, e.g. uniform_pagerank_f0.2_ds0.0001_student_t.
  std::string key() const;
};

/// Grid points in canonical order: family, strategy, fraction, then delta_s
/// (uniform) or rho (counteractive). Axes a strategy ignores are collapsed.
std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg);

/// Per-trial summary kept when trial dumps are requested.
struct TrialRecord {
  std::uint32_t n_default = 0;
  std::uint32_t n_fundamental = 0;
  std::uint32_t rounds = 0;
  bool gscc_survives = true;
};

struct SimulationOptions {
  unsigned workers = 1;
  std::vector<TrialRecord>* trials = nullptr;  ///< filled in trial order when set
  std::ostream* shock_dump = nullptr;          ///< `trial,bank_id,x`; forces one worker
};

/// One experiment over one fixed network. Plans, calibrations and balance
/// sheets are cached across grid points.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);
  Experiment(ExperimentConfig cfg, InterbankNetwork network);

  const ExperimentConfig& config() const { return cfg_; }
  const InterbankNetwork& network() const { return network_; }

  balance::RiskParams risk_params(const GridPoint& p) const;
  const balance::CalibrationResult& calibration(const GridPoint& p);
  const balance::BalanceSheetSet& balance_sheets(const GridPoint& p);
  immunize::ImmunizationPlan plan(const GridPoint& p);

  /// Runs cfg.n_trials trials. Trial t always draws from stream
  /// (master_seed, t), so the tally does not depend on the worker count.
  metrics::OutcomeAccumulator simulate(const GridPoint& p, const SimulationOptions& opts = {});

  metrics::RiskReport run_point(const GridPoint& p, unsigned workers = 1);
  metrics::RiskReport report(const metrics::OutcomeAccumulator& acc) const;

 private:
  ExperimentConfig cfg_;
  InterbankNetwork network_;
  std::map<std::string, std::vector<BankId>> uniform_orders_;
  std::map<std::string, immunize::CounteractiveOrder> pair_orders_;
  std::map<std::string, balance::CalibrationResult> calibrations_;
  std::map<std::string, balance::BalanceSheetSet> sheets_;
};

InterbankNetwork load_or_generate_network(const ExperimentConfig& cfg);

struct SweepRow {
  GridPoint point;
  metrics::RiskReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t resumed = 0;  ///< points restored from a previous run
};

/// Runs every grid point and writes, under out_dir:
///   points/<key>.json   tally of a finished point (used to resume)
///   histogram_<key>.csv default-count distribution
///   sweep.csv           one row per point x chi, appended as points finish
///   report.json         all reports, written at the end
/// Finished points found in points/ are reused when they match the seed,
/// trial count and network; sweep.csv is rebuilt from them first, which
/// drops any half-written row.
SweepResult run_sweep(Experiment& exp, const std::filesystem::path& out_dir, unsigned workers,
                      bool resume = true, std::ostream* log = nullptr);

void write_sweep_csv_header(std::ostream& out, const ExperimentConfig& cfg, std::uint64_t network_hash);
void write_sweep_csv_rows(std::ostream& out, const SweepRow& row, const ExperimentConfig& cfg);
nlohmann::ordered_json point_json(const GridPoint& p);

/// Flat (point, chi) -> cost record as stored in sweep.csv.
struct SweepCsvRow {
  GridPoint point;
  double chi = 1.0;
  double expected_cost = 0.0;
  double expected_cost_se = 0.0;
  double crisis_freq = 0.0;
  double crisis_freq_se = 0.0;
  std::optional<double> crisis_size_mean;
  double disintegration_freq = 0.0;
  double disintegration_freq_se = 0.0;
  std::uint64_t n_trials = 0;
  std::uint64_t master_seed = 0;
};

std::vector<SweepCsvRow> read_sweep_csv(std::istream& in);
std::vector<SweepCsvRow> flatten(const SweepResult& sweep, const ExperimentConfig& cfg);

/// min over fractions of E[C] under uniform / the same under counteractive,
/// per chi, for one (family, delta_s, rho) combination.
struct RelativeCostCurve {
  balance::DistFamily family = balance::DistFamily::student_t;
  double delta_s = 0.0;
  double rho = 0.0;
  std::vector<double> chi;
  std::vector<double> uniform_min;
  std::vector<double> uniform_argmin;
  std::vector<double> counteractive_min;
  std::vector<double> counteractive_argmin;
  std::vector<double> ratio;
  std::optional<double> chi_star;  ///< where the ratio passes 1
};

/// Linear interpolation of the first crossing of ratio = 1 on the chi grid.
std::optional<double> crossing_threshold(std::span<const double> chi, std::span<const double> ratio);

/// One curve per (family, uniform delta_s, counteractive rho). Throws
/// std::invalid_argument when either strategy misses a fraction or chi value
/// the other one has.
std::vector<RelativeCostCurve> relative_cost_curves(const std::vector<SweepCsvRow>& rows,
                                                    std::string_view uniform_order = "pagerank",
                                                    std::string_view counteractive_order = "random");

void write_relative_cost_csv(std::ostream& out, const std::vector<RelativeCostCurve>& curves);
nlohmann::ordered_json to_json(const std::vector<RelativeCostCurve>& curves);
/// One row per grid point: crisis frequency/size and disintegration.
void write_crisis_table_csv(std::ostream& out, const std::vector<SweepCsvRow>& rows);

}  // namespace interbank::harness
