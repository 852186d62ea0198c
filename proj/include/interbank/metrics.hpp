#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "interbank/cascade.hpp"

namespace interbank::metrics {

/// Mergeable per-point tally of trial outcomes. All state is integral, so
/// merging partial tallies in any grouping gives identical results.
class OutcomeAccumulator {
 public:
  explicit OutcomeAccumulator(std::size_t n_banks = 0) : counts_(n_banks + 1, 0) {}

  /// Rebuilds a tally from stored counts (index = number of defaults).
  static OutcomeAccumulator from_counts(std::vector<std::uint64_t> counts, std::uint64_t n_gscc_absent);

  void add(std::size_t n_default, bool gscc_survives);
  void add(const cascade::TrialOutcome& o) { add(o.n_default, o.gscc_survives); }
  void merge(const OutcomeAccumulator& other);

  std::size_t n_banks() const { return counts_.size() - 1; }
  std::uint64_t n_trials() const { return n_trials_; }
  std::uint64_t n_gscc_absent() const { return n_gscc_absent_; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  bool operator==(const OutcomeAccumulator&) const = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_trials_ = 0;
  std::uint64_t n_gscc_absent_ = 0;
};

/// q(n), n = 0..N.
struct DefaultHistogram {
  std::vector<double> q;
  std::uint64_t n_trials = 0;

  std::size_t n_banks() const { return q.empty() ? 0 : q.size() - 1; }
};

DefaultHistogram histogram(const OutcomeAccumulator& acc);

/// sum_{n>=1} q(n) n^chi, accumulated as q(n) exp(chi ln n).
double expected_cost(const DefaultHistogram& h, double chi);

/// Crisis: at least ceil(0.05 N) defaults (inclusive).
std::size_t crisis_threshold(std::size_t n_banks);

struct CrisisStats {
  double freq = 0.0;
  std::optional<double> size_mean;  ///< absent when no trial is a crisis
};
CrisisStats crisis_stats(const DefaultHistogram& h);

double disintegration_freq(std::span<const cascade::TrialOutcome> outcomes);

struct RiskReport {
  std::vector<double> chi_values;
  std::vector<double> expected_cost;
  std::vector<double> expected_cost_se;  ///< bootstrap standard error
  double crisis_freq = 0.0;
  double crisis_freq_se = 0.0;           ///< binomial standard error
  std::optional<double> crisis_size_mean;
  double disintegration_freq = 0.0;
  double disintegration_freq_se = 0.0;
  std::uint64_t n_trials = 0;
  DefaultHistogram histogram;
};

struct ReportOptions {
  std::uint64_t bootstrap_seed = 0;
  int bootstrap_resamples = 1000;
};

RiskReport make_report(const OutcomeAccumulator& acc, std::span<const double> chi_values,
                       const ReportOptions& opts = {});

/// Keys: chi_values, expected_cost, expected_cost_se, crisis_freq, crisis_freq_se,
/// crisis_size_mean (null when absent), disintegration_freq,
/// disintegration_freq_se, n_trials.
nlohmann::ordered_json to_json(const RiskReport& r);

/// `n,q`
void write_histogram_csv(std::ostream& out, const DefaultHistogram& h);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace interbank::metrics
