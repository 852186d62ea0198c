#include "interbank/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "interbank/centrality.hpp"

namespace interbank::harness {

using nlohmann::json;

bool NetworkSource::operator==(const NetworkSource& o) const {
  auto same_params = [](const graphgen::PowerLawParams& a, const graphgen::PowerLawParams& b) {
    return a.beta_exp == b.beta_exp && a.d_avg == b.d_avg && a.m_max == b.m_max && a.n_banks == b.n_banks;
  };
  if (path != o.path || generate.has_value() != o.generate.has_value()) return false;
  if (generate && (!same_params(*generate, *o.generate) || generate_seed != o.generate_seed)) return false;
  return true;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  const auto& a = risk;
  const auto& b = o.risk;
  return network == o.network && a.v_r == b.v_r && a.delta_r == b.delta_r && a.theta_lw == b.theta_lw &&
         a.theta_aw == b.theta_aw && k_loss == o.k_loss && strategies == o.strategies &&
         fractions == o.fractions && rhos == o.rhos && delta_s == o.delta_s && families == o.families &&
         chi == o.chi && n_trials == o.n_trials && master_seed == o.master_seed;
}

std::filesystem::path ExperimentConfig::network_path() const {
  if (!network.path) return {};
  std::filesystem::path p(*network.path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

void ExperimentConfig::validate() const {
  if (network.path.has_value() == network.generate.has_value()) {
    throw std::invalid_argument("network needs exactly one of 'path' or 'generate'");
  }
  if (network.generate) network.generate->validate();
  if (strategies.empty() || fractions.empty() || rhos.empty() || delta_s.empty() || families.empty() ||
      chi.empty()) {
    throw std::invalid_argument("all grids must be non-empty");
  }
  if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
  if (!(k_loss >= 0.0 && k_loss <= 1.0)) throw std::invalid_argument("k_loss must lie in [0, 1]");
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("fractions must lie in [0, 1]");
  }
  for (double r : rhos) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("rho values must lie in [0, 1]");
  }
  for (double c : chi) {
    if (!(c >= 1.0)) throw std::invalid_argument("chi values must be at least 1");
  }
  for (double ds : delta_s) {
    balance::RiskParams rp = risk;
    rp.delta_s = ds;
    rp.validate();
  }
  for (const StrategySpec& s : strategies) {
    switch (s.strategy) {
      case immunize::Strategy::none:
        if (s.order != "none") throw std::invalid_argument("strategy 'none' takes order 'none'");
        break;
      case immunize::Strategy::uniform:
        if (s.order != "random") centrality::metric_from_string(s.order);
        break;
      case immunize::Strategy::counteractive:
        immunize::mode_from_string(s.order);
        break;
    }
  }
}

namespace {

void check_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw std::invalid_argument("'" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw std::invalid_argument("unknown key '" + key + "' in '" + std::string(section) + "'");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

namespace {

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "config", {"network", "risk", "grid", "run"});
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;

  const json& net = j.at("network");
  check_keys(net, "network", {"path", "generate"});
  if (net.contains("path")) cfg.network.path = get_or<std::string>(net, "path", "");
  if (net.contains("generate")) {
    const json& g = net.at("generate");
    check_keys(g, "network.generate", {"beta_exp", "d_avg", "m_max", "n_banks", "seed"});
    graphgen::PowerLawParams p;
    p.beta_exp = get_or(g, "beta_exp", p.beta_exp);
    p.d_avg = get_or(g, "d_avg", p.d_avg);
    p.m_max = get_or(g, "m_max", p.m_max);
    p.n_banks = get_or(g, "n_banks", p.n_banks);
    cfg.network.generate = p;
    cfg.network.generate_seed = get_or(g, "seed", cfg.network.generate_seed);
  }

  if (j.contains("risk")) {
    const json& r = j.at("risk");
    check_keys(r, "risk", {"v_r", "delta_r", "theta_lw", "theta_aw", "k_loss"});
    cfg.risk.v_r = get_or(r, "v_r", cfg.risk.v_r);
    cfg.risk.delta_r = get_or(r, "delta_r", cfg.risk.delta_r);
    cfg.risk.theta_lw = get_or(r, "theta_lw", cfg.risk.theta_lw);
    cfg.risk.theta_aw = get_or(r, "theta_aw", cfg.risk.theta_aw);
    cfg.k_loss = get_or(r, "k_loss", cfg.k_loss);
  }

  const json& grid = j.at("grid");
  check_keys(grid, "grid", {"strategies", "fractions", "rho", "delta_s", "dist_family", "chi"});
  for (const json& s : grid.at("strategies")) {
    check_keys(s, "grid.strategies[]", {"strategy", "order"});
    StrategySpec spec;
    spec.strategy = immunize::strategy_from_string(s.at("strategy").get<std::string>());
    spec.order = get_or<std::string>(s, "order", "none");
    cfg.strategies.push_back(spec);
  }
  cfg.fractions = get_or(grid, "fractions", std::vector<double>{0.0});
  cfg.rhos = get_or(grid, "rho", std::vector<double>{0.6});
  cfg.delta_s = get_or(grid, "delta_s", std::vector<double>{0.0001});
  cfg.chi = get_or(grid, "chi", std::vector<double>{1.0, 2.0, 3.0, 10.0});
  cfg.families.clear();
  for (const auto& name : get_or(grid, "dist_family", std::vector<std::string>{"student_t"})) {
    cfg.families.push_back(balance::family_from_string(name));
  }

  if (j.contains("run")) {
    const json& run = j.at("run");
    check_keys(run, "run", {"n_trials", "master_seed"});
    cfg.n_trials = get_or(run, "n_trials", cfg.n_trials);
    cfg.master_seed = get_or(run, "master_seed", cfg.master_seed);
  }
  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    return parse_config(j, base_dir);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  if (cfg.network.path) j["network"]["path"] = *cfg.network.path;
  if (cfg.network.generate) {
    const auto& p = *cfg.network.generate;
    j["network"]["generate"] = {{"beta_exp", p.beta_exp},
                                {"d_avg", p.d_avg},
                                {"m_max", p.m_max},
                                {"n_banks", p.n_banks},
                                {"seed", cfg.network.generate_seed}};
  }
  j["risk"] = {{"v_r", cfg.risk.v_r},
               {"delta_r", cfg.risk.delta_r},
               {"theta_lw", cfg.risk.theta_lw},
               {"theta_aw", cfg.risk.theta_aw},
               {"k_loss", cfg.k_loss}};
  nlohmann::ordered_json strategies = nlohmann::ordered_json::array();
  for (const auto& s : cfg.strategies) {
    strategies.push_back({{"strategy", immunize::to_string(s.strategy)}, {"order", s.order}});
  }
  std::vector<std::string> families;
  for (auto f : cfg.families) families.emplace_back(balance::to_string(f));
  j["grid"] = {{"strategies", strategies}, {"fractions", cfg.fractions}, {"rho", cfg.rhos},
               {"delta_s", cfg.delta_s},   {"dist_family", families},    {"chi", cfg.chi}};
  j["run"] = {{"n_trials", cfg.n_trials}, {"master_seed", cfg.master_seed}};
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(cfg).dump(2) << '\n';
}

}  // namespace interbank::harness
