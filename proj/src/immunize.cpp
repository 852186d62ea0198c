#include "interbank/immunize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "interbank/centrality.hpp"

namespace interbank::immunize {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::uniform: return "uniform";
    case Strategy::counteractive: return "counteractive";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
  for (Strategy s : {Strategy::none, Strategy::uniform, Strategy::counteractive}) {
    if (name == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(CounteractiveMode m) {
  return m == CounteractiveMode::edge_betweenness ? "edge_betweenness" : "random";
}

CounteractiveMode mode_from_string(std::string_view name) {
  if (name == "edge_betweenness") return CounteractiveMode::edge_betweenness;
  if (name == "random") return CounteractiveMode::random;
  throw std::invalid_argument("unknown counteractive mode '" + std::string(name) + "'");
}

std::size_t immunized_count(std::size_t n_banks, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must lie in [0, 1]");
  return static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n_banks)));
}

ImmunizationPlan baseline_plan(const InterbankNetwork& g) {
  ImmunizationPlan plan;
  plan.n_banks = g.size();
  plan.provenance.network_hash = g.hash();
  plan.provenance.metric = "none";
  return plan;
}

Rng plan_stream(std::uint64_t seed, Strategy strategy, std::string_view metric) {
  std::string key = "plan:";
  key += to_string(strategy);
  key += ':';
  key += metric;
  return make_stream(seed, hash_string(key), 0);
}

std::vector<BankId> uniform_order(const InterbankNetwork& g, std::string_view metric, Rng& rng) {
  if (metric == "random") {
    std::vector<BankId> order(g.size());
    std::iota(order.begin(), order.end(), BankId{0});
    std::shuffle(order.begin(), order.end(), rng);
    return order;
  }
  const std::uint64_t tie_seed = rng();
  return centrality::compute_scores(g, centrality::metric_from_string(metric), tie_seed).order;
}

ImmunizationPlan uniform_plan_from_order(const InterbankNetwork& g, std::span<const BankId> order,
                                         std::string_view metric, double fraction, std::uint64_t seed) {
  ImmunizationPlan plan = baseline_plan(g);
  plan.strategy = Strategy::uniform;
  plan.order_metric = std::string(metric);
  plan.fraction = fraction;
  plan.provenance.seed = seed;
  plan.provenance.metric = plan.order_metric;
  const std::size_t count = immunized_count(g.size(), fraction);
  plan.uniform_set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  return plan;
}

ImmunizationPlan uniform_plan(const InterbankNetwork& g, std::string_view metric, double fraction,
                              std::uint64_t seed) {
  Rng rng = plan_stream(seed, Strategy::uniform, metric);
  const std::vector<BankId> order = uniform_order(g, metric, rng);
  return uniform_plan_from_order(g, order, metric, fraction, seed);
}

CounteractiveOrder counteractive_order(const InterbankNetwork& g, CounteractiveMode mode, Rng& rng) {
  const std::size_t n = g.size();
  std::vector<char> removed(n, 0);
  CounteractiveOrder out;
  std::vector<std::uint32_t> candidates;

  auto alive = [&](const Edge& e) { return !removed[e.borrower] && !removed[e.lender]; };

  while (true) {
    candidates.clear();
    const auto edges = g.edges();
    if (mode == CounteractiveMode::edge_betweenness) {
      const std::vector<double> bc = centrality::betweenness(g, removed).edge;
      double best = -1.0;
      for (std::uint32_t k = 0; k < edges.size(); ++k) {
        if (alive(edges[k])) best = std::max(best, bc[k]);
      }
      // Ties up to accumulated rounding.
      const double cutoff = best - 1e-9 * std::max(1.0, best);
      for (std::uint32_t k = 0; k < edges.size(); ++k) {
        if (alive(edges[k]) && bc[k] >= cutoff) candidates.push_back(k);
      }
    } else {
      for (std::uint32_t k = 0; k < edges.size(); ++k) {
        if (alive(edges[k])) candidates.push_back(k);
      }
    }
    if (candidates.empty()) break;

    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    const Edge e = edges[candidates[pick(rng)]];
    out.pairs.emplace_back(e.borrower, e.lender);
    removed[e.borrower] = 1;
    removed[e.lender] = 1;
  }

  std::vector<BankId> rest;
  for (BankId i = 0; i < n; ++i) {
    if (!removed[i]) rest.push_back(i);
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  std::size_t k = 0;
  for (; k + 1 < rest.size(); k += 2) out.pairs.emplace_back(rest[k], rest[k + 1]);
  if (k < rest.size()) out.unpaired = rest[k];
  return out;
}

ImmunizationPlan counteractive_plan_from_order(const InterbankNetwork& g, const CounteractiveOrder& order,
                                               CounteractiveMode mode, double fraction, double rho,
                                               std::uint64_t seed) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
  ImmunizationPlan plan = baseline_plan(g);
  plan.strategy = Strategy::counteractive;
  plan.order_metric = std::string(to_string(mode));
  plan.fraction = fraction;
  plan.provenance.seed = seed;
  plan.provenance.metric = plan.order_metric;
  plan.provenance.unpaired = order.unpaired;
  const std::size_t n_pairs = std::min(immunized_count(g.size(), fraction) / 2, order.pairs.size());
  plan.pairs.pairs.assign(order.pairs.begin(), order.pairs.begin() + static_cast<std::ptrdiff_t>(n_pairs));
  plan.pairs.rho = rho;
  return plan;
}

ImmunizationPlan counteractive_plan(const InterbankNetwork& g, CounteractiveMode mode, double fraction,
                                    double rho, std::uint64_t seed) {
  Rng rng = plan_stream(seed, Strategy::counteractive, to_string(mode));
  const CounteractiveOrder order = counteractive_order(g, mode, rng);
  return counteractive_plan_from_order(g, order, mode, fraction, rho, seed);
}

void write_plan_csv(std::ostream& out, const ImmunizationPlan& plan) {
  out << "# strategy=" << to_string(plan.strategy) << " metric=" << plan.order_metric
      << " seed=" << plan.provenance.seed << " fraction=" << plan.fraction << " rho=" << plan.pairs.rho
      << " network_hash=" << plan.provenance.network_hash;
  if (plan.provenance.unpaired) out << " unpaired=" << *plan.provenance.unpaired;
  out << '\n' << "rank,bank_id,partner_id\n";
  std::size_t rank = 1;
  for (BankId i : plan.uniform_set) out << rank++ << ',' << i << ",\n";
  for (const auto& [a, b] : plan.pairs.pairs) out << rank++ << ',' << a << ',' << b << '\n';
}

}  // namespace interbank::immunize
