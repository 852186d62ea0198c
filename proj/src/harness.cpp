#include "interbank/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "interbank/graphgen.hpp"
#include "interbank/random.hpp"
#include "interbank/shocks.hpp"

namespace interbank::harness {

using immunize::Strategy;
using metrics::format_double;

std::string GridPoint::key() const {
  std::string k(immunize::to_string(strategy));
  if (strategy != Strategy::none) {
    k += '_' + order + "_f" + format_double(fraction);
  }
  if (delta_s) k += "_ds" + format_double(*delta_s);
  if (rho) k += "_rho" + format_double(*rho);
  k += '_';
  k += balance::to_string(family);
  return k;
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
  std::vector<GridPoint> out;
  for (auto family : cfg.families) {
    for (const StrategySpec& s : cfg.strategies) {
      GridPoint p;
      p.strategy = s.strategy;
      p.order = s.order;
      p.family = family;
      if (s.strategy == Strategy::none) {
        out.push_back(p);
        continue;
      }
      for (double f : cfg.fractions) {
        p.fraction = f;
        if (s.strategy == Strategy::uniform) {
          for (double ds : cfg.delta_s) {
            p.delta_s = ds;
            out.push_back(p);
          }
        } else {
          for (double rho : cfg.rhos) {
            p.rho = rho;
            out.push_back(p);
          }
        }
      }
    }
  }
  return out;
}

InterbankNetwork load_or_generate_network(const ExperimentConfig& cfg) {
  if (cfg.network.path) return graphgen::load_network(cfg.network_path());
  return graphgen::generate_network(*cfg.network.generate, cfg.network.generate_seed);
}

Experiment::Experiment(ExperimentConfig cfg) : Experiment(cfg, load_or_generate_network(cfg)) {}

Experiment::Experiment(ExperimentConfig cfg, InterbankNetwork network)
    : cfg_(std::move(cfg)), network_(std::move(network)) {
  cfg_.validate();
}

balance::RiskParams Experiment::risk_params(const GridPoint& p) const {
  balance::RiskParams rp = cfg_.risk;
  rp.family = p.family;
  rp.delta_s = p.delta_s.value_or(cfg_.delta_s.front());
  return rp;
}

const balance::CalibrationResult& Experiment::calibration(const GridPoint& p) {
  const balance::RiskParams rp = risk_params(p);
  const std::string key = std::string(balance::to_string(rp.family)) + ':' + format_double(rp.delta_s);
  auto it = calibrations_.find(key);
  if (it == calibrations_.end()) it = calibrations_.emplace(key, balance::calibrate(rp)).first;
  return it->second;
}

const balance::BalanceSheetSet& Experiment::balance_sheets(const GridPoint& p) {
  // w_o and l_bar depend on the family only, not on delta_s.
  const std::string key(balance::to_string(p.family));
  auto it = sheets_.find(key);
  if (it == sheets_.end()) {
    it = sheets_.emplace(key, balance::build_balance_sheets(network_, calibration(p), risk_params(p))).first;
  }
  return it->second;
}

immunize::ImmunizationPlan Experiment::plan(const GridPoint& p) {
  switch (p.strategy) {
    case Strategy::none:
      return immunize::baseline_plan(network_);
    case Strategy::uniform: {
      auto it = uniform_orders_.find(p.order);
      if (it == uniform_orders_.end()) {
        Rng rng = immunize::plan_stream(cfg_.master_seed, Strategy::uniform, p.order);
        it = uniform_orders_.emplace(p.order, immunize::uniform_order(network_, p.order, rng)).first;
      }
      return immunize::uniform_plan_from_order(network_, it->second, p.order, p.fraction, cfg_.master_seed);
    }
    case Strategy::counteractive: {
      const auto mode = immunize::mode_from_string(p.order);
      auto it = pair_orders_.find(p.order);
      if (it == pair_orders_.end()) {
        Rng rng = immunize::plan_stream(cfg_.master_seed, Strategy::counteractive, p.order);
        it = pair_orders_.emplace(p.order, immunize::counteractive_order(network_, mode, rng)).first;
      }
      return immunize::counteractive_plan_from_order(network_, it->second, mode, p.fraction, p.rho.value_or(0.0),
                                                     cfg_.master_seed);
    }
  }
  throw std::logic_error("unhandled strategy");
}

metrics::OutcomeAccumulator Experiment::simulate(const GridPoint& p, const SimulationOptions& opts) {
  const immunize::ImmunizationPlan pl = plan(p);
  const balance::CalibrationResult& cal = calibration(p);
  const balance::BalanceSheetSet& sheets = balance_sheets(p);
  const shocks::ShockSampler sampler(pl, risk_params(p), cal);

  const std::uint64_t n_trials = cfg_.n_trials;
  std::uint64_t workers = opts.shock_dump ? 1 : std::max(1U, opts.workers);
  workers = std::min<std::uint64_t>(workers, n_trials);
  if (opts.trials) opts.trials->assign(n_trials, TrialRecord{});

  std::vector<metrics::OutcomeAccumulator> parts(workers, metrics::OutcomeAccumulator(network_.size()));
  std::vector<std::exception_ptr> errors(workers);

  auto work = [&](std::uint64_t w) {
    try {
      const std::uint64_t begin = n_trials * w / workers;
      const std::uint64_t end = n_trials * (w + 1) / workers;
      cascade::CascadeEngine engine(network_, sheets, cfg_.k_loss);
      shocks::ReturnVector rv;
      cascade::TrialOutcome outcome;
      for (std::uint64_t t = begin; t < end; ++t) {
        Rng rng = make_stream(cfg_.master_seed, kTrialStream, t);
        sampler.sample(rng, t, rv);
        engine.run(rv, outcome, true);
        parts[w].add(outcome);
        if (opts.trials) {
          (*opts.trials)[t] = {static_cast<std::uint32_t>(outcome.n_default),
                               static_cast<std::uint32_t>(outcome.fundamental.size()),
                               static_cast<std::uint32_t>(outcome.rounds), outcome.gscc_survives};
        }
        if (opts.shock_dump) shocks::write_shocks_csv(*opts.shock_dump, rv);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  {
    std::vector<std::jthread> threads;
    for (std::uint64_t w = 1; w < workers; ++w) threads.emplace_back(work, w);
    work(0);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  metrics::OutcomeAccumulator total(network_.size());
  for (const auto& part : parts) total.merge(part);
  return total;
}

metrics::RiskReport Experiment::report(const metrics::OutcomeAccumulator& acc) const {
  metrics::ReportOptions opts;
  opts.bootstrap_seed = cfg_.master_seed;
  return metrics::make_report(acc, cfg_.chi, opts);
}

metrics::RiskReport Experiment::run_point(const GridPoint& p, unsigned workers) {
  try {
    SimulationOptions opts;
    opts.workers = workers;
    return report(simulate(p, opts));
  } catch (const std::exception& e) {
    throw std::runtime_error("grid point " + p.key() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Sweep output

nlohmann::ordered_json point_json(const GridPoint& p) {
  nlohmann::ordered_json j;
  j["strategy"] = immunize::to_string(p.strategy);
  j["order"] = p.order;
  j["fraction"] = p.fraction;
  j["rho"] = p.rho ? nlohmann::ordered_json(*p.rho) : nullptr;
  j["delta_s"] = p.delta_s ? nlohmann::ordered_json(*p.delta_s) : nullptr;
  j["dist_family"] = balance::to_string(p.family);
  return j;
}

namespace {

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::optional<metrics::OutcomeAccumulator> load_point(const std::filesystem::path& path,
                                                      const ExperimentConfig& cfg, std::uint64_t network_hash,
                                                      std::size_t n_banks) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("master_seed").get<std::uint64_t>() != cfg.master_seed ||
        j.at("n_trials").get<std::uint64_t>() != cfg.n_trials ||
        j.at("network_hash").get<std::uint64_t>() != network_hash ||
        j.at("k_loss").get<double>() != cfg.k_loss) {
      return std::nullopt;
    }
    auto counts = j.at("counts").get<std::vector<std::uint64_t>>();
    if (counts.size() != n_banks + 1) return std::nullopt;
    auto acc = metrics::OutcomeAccumulator::from_counts(std::move(counts), j.at("n_gscc_absent").get<std::uint64_t>());
    if (acc.n_trials() != cfg.n_trials) return std::nullopt;
    return acc;
  } catch (const std::exception&) {
    return std::nullopt;  // partial or foreign file: recompute
  }
}

std::string point_file_content(const GridPoint& p, const metrics::OutcomeAccumulator& acc,
                               const ExperimentConfig& cfg, std::uint64_t network_hash) {
  nlohmann::ordered_json j;
  j["key"] = p.key();
  j["point"] = point_json(p);
  j["master_seed"] = cfg.master_seed;
  j["n_trials"] = cfg.n_trials;
  j["k_loss"] = cfg.k_loss;
  j["network_hash"] = network_hash;
  j["n_gscc_absent"] = acc.n_gscc_absent();
  j["counts"] = std::vector<std::uint64_t>(acc.counts().begin(), acc.counts().end());
  return j.dump() + "\n";
}

}  // namespace

void write_sweep_csv_header(std::ostream& out, const ExperimentConfig& cfg, std::uint64_t network_hash) {
  out << "# interbank sweep network_hash=" << network_hash << " master_seed=" << cfg.master_seed
      << " n_trials=" << cfg.n_trials << '\n';
  out << "strategy,order,fraction,rho,delta_s,dist_family,chi,expected_cost,expected_cost_se,"
         "crisis_freq,crisis_freq_se,crisis_size_mean,disintegration_freq,disintegration_freq_se,"
         "n_trials,master_seed\n";
}

void write_sweep_csv_rows(std::ostream& out, const SweepRow& row, const ExperimentConfig& cfg) {
  const auto& p = row.point;
  const auto& r = row.report;
  for (std::size_t c = 0; c < r.chi_values.size(); ++c) {
    out << immunize::to_string(p.strategy) << ',' << p.order << ',' << format_double(p.fraction) << ','
        << opt_field(p.rho) << ',' << opt_field(p.delta_s) << ',' << balance::to_string(p.family) << ','
        << format_double(r.chi_values[c]) << ',' << format_double(r.expected_cost[c]) << ','
        << format_double(r.expected_cost_se[c]) << ',' << format_double(r.crisis_freq) << ','
        << format_double(r.crisis_freq_se) << ',' << opt_field(r.crisis_size_mean) << ','
        << format_double(r.disintegration_freq) << ',' << format_double(r.disintegration_freq_se) << ','
        << r.n_trials << ',' << cfg.master_seed << '\n';
  }
}

SweepResult run_sweep(Experiment& exp, const std::filesystem::path& out_dir, unsigned workers, bool resume,
                      std::ostream* log) {
  const ExperimentConfig& cfg = exp.config();
  const std::uint64_t network_hash = exp.network().hash();
  const std::filesystem::path points_dir = out_dir / "points";
  std::filesystem::create_directories(points_dir);

  const std::vector<GridPoint> grid = expand_grid(cfg);
  std::vector<std::optional<metrics::OutcomeAccumulator>> tallies(grid.size());
  SweepResult result;
  if (resume) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      tallies[k] = load_point(points_dir / (grid[k].key() + ".json"), cfg, network_hash, exp.network().size());
      if (tallies[k]) ++result.resumed;
    }
  }

  auto row_for = [&](std::size_t k) { return SweepRow{grid[k], exp.report(*tallies[k])}; };

  std::ofstream sweep_csv(out_dir / "sweep.csv", std::ios::binary | std::ios::trunc);
  if (!sweep_csv) throw std::runtime_error("cannot write " + (out_dir / "sweep.csv").string());
  write_sweep_csv_header(sweep_csv, cfg, network_hash);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (tallies[k]) write_sweep_csv_rows(sweep_csv, row_for(k), cfg);
  }
  sweep_csv.flush();

  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (tallies[k]) continue;
    const GridPoint& p = grid[k];
    if (log) *log << "[" << (k + 1) << "/" << grid.size() << "] " << p.key() << std::endl;
    try {
      SimulationOptions opts;
      opts.workers = workers;
      tallies[k] = exp.simulate(p, opts);
    } catch (const std::exception& e) {
      throw std::runtime_error("grid point " + p.key() + ": " + e.what());
    }
    write_atomically(points_dir / (p.key() + ".json"), point_file_content(p, *tallies[k], cfg, network_hash));
    const SweepRow row = row_for(k);
    std::ofstream hist(out_dir / ("histogram_" + p.key() + ".csv"), std::ios::binary | std::ios::trunc);
    metrics::write_histogram_csv(hist, row.report.histogram);
    write_sweep_csv_rows(sweep_csv, row, cfg);
    sweep_csv.flush();
  }
  sweep_csv.close();

  // Canonical order regardless of which points were resumed.
  std::ostringstream csv;
  write_sweep_csv_header(csv, cfg, network_hash);
  nlohmann::ordered_json report;
  report["config"] = to_json(cfg);
  report["network_hash"] = network_hash;
  report["points"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    SweepRow row = row_for(k);
    write_sweep_csv_rows(csv, row, cfg);
    const auto hist_path = out_dir / ("histogram_" + grid[k].key() + ".csv");
    if (!std::filesystem::exists(hist_path)) {
      std::ofstream hist(hist_path, std::ios::binary);
      metrics::write_histogram_csv(hist, row.report.histogram);
    }
    nlohmann::ordered_json entry;
    entry["key"] = grid[k].key();
    entry["point"] = point_json(grid[k]);
    entry["report"] = metrics::to_json(row.report);
    report["points"].push_back(entry);
    result.rows.push_back(std::move(row));
  }
  write_atomically(out_dir / "sweep.csv", csv.str());
  write_atomically(out_dir / "report.json", report.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// Reading sweeps back and relative costs

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

std::optional<double> to_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_double(s);
}

}  // namespace

std::vector<SweepCsvRow> read_sweep_csv(std::istream& in) {
  std::vector<SweepCsvRow> rows;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 16) {
      throw std::invalid_argument("sweep.csv line " + std::to_string(line_no) + ": expected 16 fields");
    }
    try {
      SweepCsvRow r;
      r.point.strategy = immunize::strategy_from_string(f[0]);
      r.point.order = f[1];
      r.point.fraction = to_double(f[2]);
      r.point.rho = to_opt(f[3]);
      r.point.delta_s = to_opt(f[4]);
      r.point.family = balance::family_from_string(f[5]);
      r.chi = to_double(f[6]);
      r.expected_cost = to_double(f[7]);
      r.expected_cost_se = to_double(f[8]);
      r.crisis_freq = to_double(f[9]);
      r.crisis_freq_se = to_double(f[10]);
      r.crisis_size_mean = to_opt(f[11]);
      r.disintegration_freq = to_double(f[12]);
      r.disintegration_freq_se = to_double(f[13]);
      r.n_trials = std::stoull(f[14]);
      r.master_seed = std::stoull(f[15]);
      rows.push_back(r);
    } catch (const std::exception& e) {
      throw std::invalid_argument("sweep.csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<SweepCsvRow> flatten(const SweepResult& sweep, const ExperimentConfig& cfg) {
  std::vector<SweepCsvRow> rows;
  for (const SweepRow& s : sweep.rows) {
    for (std::size_t c = 0; c < s.report.chi_values.size(); ++c) {
      SweepCsvRow r;
      r.point = s.point;
      r.chi = s.report.chi_values[c];
      r.expected_cost = s.report.expected_cost[c];
      r.expected_cost_se = s.report.expected_cost_se[c];
      r.crisis_freq = s.report.crisis_freq;
      r.crisis_freq_se = s.report.crisis_freq_se;
      r.crisis_size_mean = s.report.crisis_size_mean;
      r.disintegration_freq = s.report.disintegration_freq;
      r.disintegration_freq_se = s.report.disintegration_freq_se;
      r.n_trials = s.report.n_trials;
      r.master_seed = cfg.master_seed;
      rows.push_back(r);
    }
  }
  return rows;
}

std::optional<double> crossing_threshold(std::span<const double> chi, std::span<const double> ratio) {
  for (std::size_t k = 0; k < chi.size() && k < ratio.size(); ++k) {
    if (ratio[k] == 1.0) return chi[k];
    if (k + 1 < chi.size() && k + 1 < ratio.size()) {
      const double a = ratio[k] - 1.0, b = ratio[k + 1] - 1.0;
      if (a * b < 0.0 && std::isfinite(a) && std::isfinite(b)) {
        return chi[k] + (chi[k + 1] - chi[k]) * (-a) / (b - a);
      }
    }
  }
  return std::nullopt;
}

std::vector<RelativeCostCurve> relative_cost_curves(const std::vector<SweepCsvRow>& rows,
                                                    std::string_view uniform_order,
                                                    std::string_view counteractive_order) {
  std::vector<RelativeCostCurve> curves;
  std::set<balance::DistFamily> families;
  for (const auto& r : rows) families.insert(r.point.family);

  for (auto family : families) {
    std::vector<const SweepCsvRow*> uni, cnt;
    std::set<double> ds_values, rho_values;
    for (const auto& r : rows) {
      if (r.point.family != family) continue;
      if (r.point.strategy == Strategy::uniform && r.point.order == uniform_order) {
        uni.push_back(&r);
        ds_values.insert(r.point.delta_s.value_or(0.0));
      } else if (r.point.strategy == Strategy::counteractive && r.point.order == counteractive_order) {
        cnt.push_back(&r);
        rho_values.insert(r.point.rho.value_or(0.0));
      }
    }
    if (uni.empty() || cnt.empty()) {
      throw std::invalid_argument("relative cost needs uniform/" + std::string(uniform_order) + " and counteractive/" +
                                  std::string(counteractive_order) + " rows for " +
                                  std::string(balance::to_string(family)));
    }

    for (double ds : ds_values) {
      for (double rho : rho_values) {
        // chi -> fraction -> cost
        std::map<double, std::map<double, double>> u_cost, c_cost;
        for (const auto* r : uni) {
          if (r->point.delta_s.value_or(0.0) == ds) u_cost[r->chi][r->point.fraction] = r->expected_cost;
        }
        for (const auto* r : cnt) {
          if (r->point.rho.value_or(0.0) == rho) c_cost[r->chi][r->point.fraction] = r->expected_cost;
        }
        auto keys = [](const auto& m) {
          std::vector<double> k;
          for (const auto& [key, v] : m) k.push_back(key);
          return k;
        };
        if (keys(u_cost) != keys(c_cost)) throw std::invalid_argument("relative cost: chi grids differ");
        RelativeCostCurve curve;
        curve.family = family;
        curve.delta_s = ds;
        curve.rho = rho;
        for (const auto& [chi, by_fraction] : u_cost) {
          const auto& other = c_cost.at(chi);
          if (keys(by_fraction) != keys(other)) {
            throw std::invalid_argument("relative cost: fraction grids differ at chi=" + format_double(chi));
          }
          auto best = [](const std::map<double, double>& m) {
            auto it = std::min_element(m.begin(), m.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
            return *it;
          };
          const auto [uf, uc] = best(by_fraction);
          const auto [cf, cc] = best(other);
          curve.chi.push_back(chi);
          curve.uniform_min.push_back(uc);
          curve.uniform_argmin.push_back(uf);
          curve.counteractive_min.push_back(cc);
          curve.counteractive_argmin.push_back(cf);
          double ratio;
          if (cc > 0.0) {
            ratio = uc / cc;
          } else {
            ratio = uc > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
          }
          curve.ratio.push_back(ratio);
        }
        curve.chi_star = crossing_threshold(curve.chi, curve.ratio);
        curves.push_back(std::move(curve));
      }
    }
  }
  return curves;
}

void write_relative_cost_csv(std::ostream& out, const std::vector<RelativeCostCurve>& curves) {
  out << "dist_family,delta_s,rho,chi,uniform_min,uniform_argmin,counteractive_min,counteractive_argmin,ratio\n";
  for (const auto& c : curves) {
    for (std::size_t k = 0; k < c.chi.size(); ++k) {
      out << balance::to_string(c.family) << ',' << format_double(c.delta_s) << ',' << format_double(c.rho) << ','
          << format_double(c.chi[k]) << ',' << format_double(c.uniform_min[k]) << ','
          << format_double(c.uniform_argmin[k]) << ',' << format_double(c.counteractive_min[k]) << ','
          << format_double(c.counteractive_argmin[k]) << ',' << format_double(c.ratio[k]) << '\n';
    }
  }
}

nlohmann::ordered_json to_json(const std::vector<RelativeCostCurve>& curves) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : curves) {
    nlohmann::ordered_json j;
    j["dist_family"] = balance::to_string(c.family);
    j["delta_s"] = c.delta_s;
    j["rho"] = c.rho;
    j["chi"] = c.chi;
    j["ratio"] = c.ratio;
    j["uniform_min"] = c.uniform_min;
    j["counteractive_min"] = c.counteractive_min;
    j["chi_star"] = c.chi_star ? nlohmann::ordered_json(*c.chi_star) : nullptr;
    arr.push_back(j);
  }
  return arr;
}

void write_crisis_table_csv(std::ostream& out, const std::vector<SweepCsvRow>& rows) {
  out << "strategy,order,fraction,rho,delta_s,dist_family,crisis_freq,crisis_freq_se,crisis_size_mean,"
         "disintegration_freq,disintegration_freq_se,n_trials\n";
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (!seen.insert(r.point.key()).second) continue;
    const auto& p = r.point;
    out << immunize::to_string(p.strategy) << ',' << p.order << ',' << format_double(p.fraction) << ','
        << opt_field(p.rho) << ',' << opt_field(p.delta_s) << ',' << balance::to_string(p.family) << ','
        << format_double(r.crisis_freq) << ',' << format_double(r.crisis_freq_se) << ','
        << opt_field(r.crisis_size_mean) << ',' << format_double(r.disintegration_freq) << ','
        << format_double(r.disintegration_freq_se) << ',' << r.n_trials << '\n';
  }
}

}  // namespace interbank::harness
