#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "interbank/balance.hpp"
#include "interbank/centrality.hpp"
#include "interbank/config.hpp"
#include "interbank/graphgen.hpp"
#include "interbank/harness.hpp"

namespace fs = std::filesystem;
using namespace interbank;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  unsigned workers = 1;
  std::string out = "out";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "Override run.master_seed");
  app->add_option("--trials", c.trials, "Override run.n_trials")->check(CLI::PositiveNumber);
  app->add_option("-w,--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("-o,--out", c.out, "Output directory");
}

harness::ExperimentConfig load(const Common& c) {
  auto cfg = harness::load_config(c.config);
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.trials) cfg.n_trials = *c.trials;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interbank contagion and immunization simulator"};
  app.require_subcommand(1);

  // gen-net
  graphgen::PowerLawParams gp;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-net", "Generate a directed power-law interbank network");
  gen->add_option("-n,--n-banks", gp.n_banks, "Number of banks");
  gen->add_option("--beta", gp.beta_exp, "Power-law exponent");
  gen->add_option("--d-avg", gp.d_avg, "Average degree parameter");
  gen->add_option("--m-max", gp.m_max, "Maximum expected degree");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("-o,--out", gen_out, "Edge-list file")->required();

  // calibrate
  balance::RiskParams rp;
  std::string cal_family = "student_t";
  auto* cal = app.add_subcommand("calibrate", "Solve w_o and v_s for the risk parameters");
  cal->add_option("--v-r", rp.v_r, "Risky-asset degrees of freedom");
  cal->add_option("--delta-r", rp.delta_r, "Fundamental default probability");
  cal->add_option("--delta-s", rp.delta_s, "Common-asset default probability");
  cal->add_option("--theta-lw", rp.theta_lw, "Interbank lending / net worth");
  cal->add_option("--theta-aw", rp.theta_aw, "Risky assets / net worth");
  cal->add_option("--family", cal_family, "student_t or normal");

  // scores
  std::string sc_net, sc_metric = "pagerank", sc_out;
  std::uint64_t sc_seed = 1;
  auto* sc = app.add_subcommand("scores", "Centrality scores of a network");
  sc->add_option("-n,--network", sc_net, "Edge-list file")->required()->check(CLI::ExistingFile);
  sc->add_option("-m,--metric", sc_metric, "pagerank, in_degree, eigenvector, node_betweenness, restrepo");
  sc->add_option("--seed", sc_seed, "Tie-break seed");
  sc->add_option("-o,--out", sc_out, "Output CSV (stdout if omitted)");

  // run
  Common run_c;
  std::string r_strategy, r_order, r_family;
  std::optional<double> r_fraction, r_rho, r_delta_s;
  bool dump_trials = false;
  bool dump_shocks = false;
  auto* run = app.add_subcommand("run", "Simulate one grid point");
  add_common(run, run_c);
  run->add_option("--strategy", r_strategy, "none, uniform or counteractive");
  run->add_option("--order", r_order, "Ordering metric");
  run->add_option("--fraction", r_fraction, "Immunized fraction");
  run->add_option("--rho", r_rho, "Pair anticorrelation");
  run->add_option("--delta-s", r_delta_s, "Common-asset default probability");
  run->add_option("--family", r_family, "student_t or normal");
  run->add_flag("--dump-trials", dump_trials, "Write trials.csv");
  run->add_flag("--dump-shocks", dump_shocks, "Write shocks.csv (single worker)");

  // sweep
  Common sw_c;
  bool no_resume = false;
  auto* sweep = app.add_subcommand("sweep", "Run the full experiment grid");
  add_common(sweep, sw_c);
  sweep->add_flag("--no-resume", no_resume, "Ignore finished points in the output directory");

  // report
  std::string rep_in, rep_out = ".", rep_uorder = "pagerank", rep_corder = "random";
  auto* rep = app.add_subcommand("report", "Relative cost and crisis tables from sweep.csv");
  rep->add_option("-i,--sweep", rep_in, "sweep.csv")->required()->check(CLI::ExistingFile);
  rep->add_option("-o,--out", rep_out, "Output directory");
  rep->add_option("--uniform-order", rep_uorder, "Uniform ordering to compare");
  rep->add_option("--counteractive-order", rep_corder, "Counteractive ordering to compare");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto g = graphgen::generate_network(gp, gen_seed);
      graphgen::save_network(g, gen_out);
      std::cout << "banks=" << g.size() << " edges=" << g.edge_count() << " hash=" << g.hash() << '\n';
    } else if (*cal) {
      rp.family = balance::family_from_string(cal_family);
      rp.validate();
      const auto c = balance::calibrate(rp);
      nlohmann::ordered_json j;
      j["dist_family"] = balance::to_string(c.family);
      j["w_o"] = c.w_o;
      j["l_bar"] = c.l_bar;
      j[c.family == balance::DistFamily::normal ? "sigma_s" : "v_s"] = c.v_s;
      std::cout << j.dump(2) << '\n';
    } else if (*sc) {
      const auto g = graphgen::load_network(sc_net);
      const auto s = centrality::compute_scores(g, centrality::metric_from_string(sc_metric), sc_seed);
      if (sc_out.empty()) {
        centrality::write_scores_csv(std::cout, s);
      } else {
        auto out = open_out(sc_out);
        centrality::write_scores_csv(out, s);
      }
    } else if (*run) {
      auto cfg = load(run_c);
      harness::GridPoint p = harness::expand_grid(cfg).front();
      if (!r_strategy.empty()) p.strategy = immunize::strategy_from_string(r_strategy);
      if (!r_order.empty()) p.order = r_order;
      if (r_fraction) p.fraction = *r_fraction;
      if (!r_family.empty()) p.family = balance::family_from_string(r_family);
      p.rho.reset();
      p.delta_s.reset();
      if (p.strategy == immunize::Strategy::uniform) p.delta_s = r_delta_s.value_or(cfg.delta_s.front());
      if (p.strategy == immunize::Strategy::counteractive) p.rho = r_rho.value_or(cfg.rhos.front());
      if (p.strategy == immunize::Strategy::none) {
        p.order = "none";
        p.fraction = 0.0;
      }
      if (r_delta_s) cfg.delta_s = {*r_delta_s};

      const fs::path out_dir = run_c.out;
      fs::create_directories(out_dir);
      harness::Experiment exp(cfg);
      const auto plan = exp.plan(p);
      {
        auto out = open_out(out_dir / "plan.csv");
        immunize::write_plan_csv(out, plan);
      }
      {
        auto out = open_out(out_dir / "balance.csv");
        balance::write_balance_csv(out, exp.balance_sheets(p));
      }
      if (p.strategy == immunize::Strategy::uniform && p.order != "random") {
        auto out = open_out(out_dir / ("scores_" + p.order + ".csv"));
        centrality::write_scores_csv(
            out, centrality::compute_scores(exp.network(), centrality::metric_from_string(p.order), cfg.master_seed));
      }

      std::vector<harness::TrialRecord> trials;
      std::optional<std::ofstream> shocks_out;
      harness::SimulationOptions opts;
      opts.workers = run_c.workers;
      if (dump_trials) opts.trials = &trials;
      if (dump_shocks) {
        shocks_out = open_out(out_dir / "shocks.csv");
        *shocks_out << "trial,bank_id,x\n";
        opts.shock_dump = &*shocks_out;
      }
      const auto t0 = std::chrono::steady_clock::now();
      const auto acc = exp.simulate(p, opts);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const auto report = exp.report(acc);

      nlohmann::ordered_json j;
      j["key"] = p.key();
      j["point"] = harness::point_json(p);
      j["network_hash"] = exp.network().hash();
      j["master_seed"] = cfg.master_seed;
      j["report"] = metrics::to_json(report);
      {
        auto out = open_out(out_dir / "report.json");
        out << j.dump(2) << '\n';
      }
      {
        auto out = open_out(out_dir / "histogram.csv");
        metrics::write_histogram_csv(out, report.histogram);
      }
      if (dump_trials) {
        auto out = open_out(out_dir / "trials.csv");
        out << "trial,n_default,n_fundamental,rounds,gscc_survives\n";
        for (std::size_t t = 0; t < trials.size(); ++t) {
          out << t << ',' << trials[t].n_default << ',' << trials[t].n_fundamental << ',' << trials[t].rounds << ','
              << (trials[t].gscc_survives ? 1 : 0) << '\n';
        }
      }
      std::cerr << p.key() << ": " << cfg.n_trials << " trials in " << secs << " s ("
                << static_cast<double>(cfg.n_trials) / secs << " trials/s)\n";
      std::cout << j["report"].dump(2) << '\n';
    } else if (*sweep) {
      const auto cfg = load(sw_c);
      harness::Experiment exp(cfg);
      const auto result = harness::run_sweep(exp, sw_c.out, sw_c.workers, !no_resume, &std::cerr);
      std::cerr << "points=" << result.rows.size() << " resumed=" << result.resumed << '\n';
    } else if (*rep) {
      std::ifstream in(rep_in);
      const auto rows = harness::read_sweep_csv(in);
      const fs::path out_dir = rep_out;
      fs::create_directories(out_dir);
      const auto curves = harness::relative_cost_curves(rows, rep_uorder, rep_corder);
      {
        auto out = open_out(out_dir / "relative_cost.csv");
        harness::write_relative_cost_csv(out, curves);
      }
      {
        auto out = open_out(out_dir / "relative_cost.json");
        out << harness::to_json(curves).dump(2) << '\n';
      }
      {
        auto out = open_out(out_dir / "crisis_table.csv");
        harness::write_crisis_table_csv(out, rows);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
