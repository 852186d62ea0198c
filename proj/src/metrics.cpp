#include "interbank/metrics.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "interbank/random.hpp"

namespace interbank::metrics {

void OutcomeAccumulator::add(std::size_t n_default, bool gscc_survives) {
  if (n_default >= counts_.size()) throw std::out_of_range("default count exceeds number of banks");
  ++counts_[n_default];
  ++n_trials_;
  if (!gscc_survives) ++n_gscc_absent_;
}

OutcomeAccumulator OutcomeAccumulator::from_counts(std::vector<std::uint64_t> counts, std::uint64_t n_gscc_absent) {
  if (counts.empty()) throw std::invalid_argument("empty count vector");
  OutcomeAccumulator acc;
  acc.counts_ = std::move(counts);
  for (auto c : acc.counts_) acc.n_trials_ += c;
  if (n_gscc_absent > acc.n_trials_) throw std::invalid_argument("more disintegrations than trials");
  acc.n_gscc_absent_ = n_gscc_absent;
  return acc;
}

void OutcomeAccumulator::merge(const OutcomeAccumulator& other) {
  if (other.counts_.size() != counts_.size()) throw std::invalid_argument("merging tallies of different sizes");
  for (std::size_t n = 0; n < counts_.size(); ++n) counts_[n] += other.counts_[n];
  n_trials_ += other.n_trials_;
  n_gscc_absent_ += other.n_gscc_absent_;
}

DefaultHistogram histogram(const OutcomeAccumulator& acc) {
  DefaultHistogram h;
  h.n_trials = acc.n_trials();
  h.q.assign(acc.counts().size(), 0.0);
  if (h.n_trials == 0) return h;
  const double total = static_cast<double>(h.n_trials);
  for (std::size_t n = 0; n < h.q.size(); ++n) h.q[n] = static_cast<double>(acc.counts()[n]) / total;
  return h;
}

double expected_cost(const DefaultHistogram& h, double chi) {
  if (!(chi >= 1.0)) throw std::invalid_argument("chi must be at least 1");
  double sum = 0.0;
  for (std::size_t n = 1; n < h.q.size(); ++n) {
    if (h.q[n] > 0.0) sum += h.q[n] * std::exp(chi * std::log(static_cast<double>(n)));
  }
  return sum;
}

std::size_t crisis_threshold(std::size_t n_banks) {
  // ceil(0.05 N) in integers: 5 N / 100 rounded up.
  return (5 * n_banks + 99) / 100;
}

CrisisStats crisis_stats(const DefaultHistogram& h) {
  CrisisStats s;
  double weighted = 0.0;
  for (std::size_t n = crisis_threshold(h.n_banks()); n < h.q.size(); ++n) {
    s.freq += h.q[n];
    weighted += static_cast<double>(n) * h.q[n];
  }
  if (s.freq > 0.0) s.size_mean = weighted / s.freq;
  return s;
}

double disintegration_freq(std::span<const cascade::TrialOutcome> outcomes) {
  if (outcomes.empty()) return 0.0;
  std::size_t absent = 0;
  for (const auto& o : outcomes) absent += o.gscc_survives ? 0 : 1;
  return static_cast<double>(absent) / static_cast<double>(outcomes.size());
}

namespace {

double binomial_se(double p, std::uint64_t n) {
  return n == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

/// Multinomial resample of the tally via conditional binomials over the bins.
std::vector<std::uint64_t> resample(std::span<const std::uint64_t> counts, std::uint64_t total, Rng& rng) {
  std::vector<std::uint64_t> out(counts.size(), 0);
  std::uint64_t left = total, mass_left = total;
  for (std::size_t n = 0; n < counts.size() && left > 0; ++n) {
    if (counts[n] == 0) continue;
    if (counts[n] == mass_left) {
      out[n] = left;
      break;
    }
    const double p = static_cast<double>(counts[n]) / static_cast<double>(mass_left);
    std::binomial_distribution<std::uint64_t> draw(left, p);
    out[n] = draw(rng);
    left -= out[n];
    mass_left -= counts[n];
  }
  return out;
}

}  // namespace

RiskReport make_report(const OutcomeAccumulator& acc, std::span<const double> chi_values,
                       const ReportOptions& opts) {
  RiskReport r;
  r.n_trials = acc.n_trials();
  r.histogram = histogram(acc);
  r.chi_values.assign(chi_values.begin(), chi_values.end());
  for (double chi : chi_values) r.expected_cost.push_back(expected_cost(r.histogram, chi));

  // Counted on the integer tally.
  std::uint64_t crises = 0, crisis_defaults = 0;
  for (std::size_t n = crisis_threshold(acc.n_banks()); n < acc.counts().size(); ++n) {
    crises += acc.counts()[n];
    crisis_defaults += n * acc.counts()[n];
  }
  if (r.n_trials) r.crisis_freq = static_cast<double>(crises) / static_cast<double>(r.n_trials);
  if (crises) r.crisis_size_mean = static_cast<double>(crisis_defaults) / static_cast<double>(crises);
  r.crisis_freq_se = binomial_se(r.crisis_freq, r.n_trials);
  r.disintegration_freq =
      r.n_trials ? static_cast<double>(acc.n_gscc_absent()) / static_cast<double>(r.n_trials) : 0.0;
  r.disintegration_freq_se = binomial_se(r.disintegration_freq, r.n_trials);

  r.expected_cost_se.assign(chi_values.size(), 0.0);
  if (r.n_trials > 1 && opts.bootstrap_resamples > 1) {
    Rng rng = make_stream(opts.bootstrap_seed, kBootstrapStream, 0);
    std::vector<double> sum(chi_values.size(), 0.0), sum_sq(chi_values.size(), 0.0);
    DefaultHistogram boot;
    boot.q.resize(r.histogram.q.size());
    boot.n_trials = r.n_trials;
    for (int b = 0; b < opts.bootstrap_resamples; ++b) {
      const auto counts = resample(acc.counts(), r.n_trials, rng);
      for (std::size_t n = 0; n < counts.size(); ++n) {
        boot.q[n] = static_cast<double>(counts[n]) / static_cast<double>(r.n_trials);
      }
      for (std::size_t c = 0; c < chi_values.size(); ++c) {
        const double v = expected_cost(boot, chi_values[c]);
        sum[c] += v;
        sum_sq[c] += v * v;
      }
    }
    const double m = opts.bootstrap_resamples;
    for (std::size_t c = 0; c < chi_values.size(); ++c) {
      const double mean = sum[c] / m;
      r.expected_cost_se[c] = std::sqrt(std::max(0.0, (sum_sq[c] - m * mean * mean) / (m - 1.0)));
    }
  }
  return r;
}

nlohmann::ordered_json to_json(const RiskReport& r) {
  nlohmann::ordered_json j;
  j["chi_values"] = r.chi_values;
  j["expected_cost"] = r.expected_cost;
  j["expected_cost_se"] = r.expected_cost_se;
  j["crisis_freq"] = r.crisis_freq;
  j["crisis_freq_se"] = r.crisis_freq_se;
  j["crisis_size_mean"] = r.crisis_size_mean ? nlohmann::ordered_json(*r.crisis_size_mean) : nullptr;
  j["disintegration_freq"] = r.disintegration_freq;
  j["disintegration_freq_se"] = r.disintegration_freq_se;
  j["n_trials"] = r.n_trials;
  return j;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_histogram_csv(std::ostream& out, const DefaultHistogram& h) {
  out << "# n_trials=" << h.n_trials << '\n' << "n,q\n";
  for (std::size_t n = 0; n < h.q.size(); ++n) out << n << ',' << format_double(h.q[n]) << '\n';
}

}  // namespace interbank::metrics
