#include "interbank/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <queue>

#include "interbank/random.hpp"

namespace interbank::centrality {

namespace {

constexpr double kEigenTol = 1e-12;
constexpr int kEigenMaxIter = 100000;

bool is_removed(std::span<const char> removed, BankId i) {
  return !removed.empty() && removed[i] != 0;
}

/// Drops banks with no surviving in- or out-edge until none is left to drop.
/// What remains is the union of all surviving cycles (and paths between them).
std::vector<char> cycle_core(const InterbankNetwork& g, std::span<const char> removed) {
  const std::size_t n = g.size();
  std::vector<char> alive(n, 1);
  std::vector<std::uint32_t> n_lenders(n, 0), n_borrowers(n, 0);
  for (BankId i = 0; i < n; ++i) {
    if (is_removed(removed, i)) alive[i] = 0;
  }
  for (const Edge& e : g.edges()) {
    if (alive[e.borrower] && alive[e.lender]) {
      ++n_lenders[e.borrower];
      ++n_borrowers[e.lender];
    }
  }
  std::vector<BankId> stack;
  for (BankId i = 0; i < n; ++i) {
    if (alive[i] && (n_lenders[i] == 0 || n_borrowers[i] == 0)) {
      alive[i] = 0;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const BankId i = stack.back();
    stack.pop_back();
    for (BankId j : g.lenders_of(i)) {
      if (alive[j] && --n_borrowers[j] == 0) {
        alive[j] = 0;
        stack.push_back(j);
      }
    }
    for (BankId j : g.borrowers_of(i)) {
      if (alive[j] && --n_lenders[j] == 0) {
        alive[j] = 0;
        stack.push_back(j);
      }
    }
  }
  return alive;
}

/// Collatz-Wielandt bounds for lambda_max on the core, iterating x <- (A+I)x.
/// Stops as soon as the bounds decide `lambda >= threshold`, or when they are
/// within `tol` of each other. A NaN threshold never decides.
struct SpectralBounds {
  double lower = 0.0;
  double upper = 0.0;
};

SpectralBounds core_bounds(const InterbankNetwork& g, const std::vector<char>& core,
                           double threshold, double tol) {
  const std::size_t n = g.size();
  std::vector<double> x(n, 0.0), y(n, 0.0);
  for (BankId i = 0; i < n; ++i) x[i] = core[i] ? 1.0 : 0.0;
  SpectralBounds b;
  for (int it = 0; it < kEigenMaxIter; ++it) {
    double lo = INFINITY, hi = 0.0, top = 0.0;
    for (BankId i = 0; i < n; ++i) {
      if (!core[i]) continue;
      double s = x[i];
      for (BankId j : g.lenders_of(i)) {
        if (core[j]) s += x[j];
      }
      y[i] = s;
      const double r = s / x[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      top = std::max(top, s);
    }
    b.lower = lo - 1.0;
    b.upper = hi - 1.0;
    if (b.lower >= threshold || b.upper < threshold || b.upper - b.lower < tol) return b;
    for (BankId i = 0; i < n; ++i) x[i] = core[i] ? y[i] / top : 0.0;
  }
  return b;
}

struct Eigenpair {
  std::vector<double> vec;
  double value = 0.0;
};

/// Dominant eigenvector of A (transpose=false) or A^T by power iteration on
/// the shifted matrix A+I, which has the same eigenvectors and no periodicity.
Eigenpair dominant_eigenvector(const InterbankNetwork& g, bool transpose) {
  const std::size_t n = g.size();
  Eigenpair out;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  for (int it = 0; it < kEigenMaxIter; ++it) {
    for (BankId i = 0; i < n; ++i) {
      double s = x[i];
      if (transpose) {
        for (BankId j : g.borrowers_of(i)) s += x[j];
      } else {
        for (BankId j : g.lenders_of(i)) s += x[j];
      }
      y[i] = s;
    }
    double norm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    out.value = norm - 1.0;
    double change = 0.0;
    for (BankId i = 0; i < n; ++i) {
      y[i] /= norm;
      change = std::max(change, std::abs(y[i] - x[i]));
    }
    x.swap(y);
    if (change < kEigenTol) break;
  }
  out.vec = std::move(x);
  return out;
}

CentralityScores finish(Metric metric, std::vector<double> scores, std::uint64_t tie_seed) {
  CentralityScores s;
  s.metric = metric;
  s.tie_seed = tie_seed;
  s.order = rank_descending(scores, tie_seed);
  s.scores = std::move(scores);
  return s;
}

CentralityScores degenerate_scores(Metric metric, std::size_t n, std::uint64_t tie_seed) {
  CentralityScores s = finish(metric, std::vector<double>(n, 0.0), tie_seed);
  s.degenerate = true;
  return s;
}

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::pagerank: return "pagerank";
    case Metric::in_degree: return "in_degree";
    case Metric::eigenvector: return "eigenvector";
    case Metric::node_betweenness: return "node_betweenness";
    case Metric::restrepo: return "restrepo";
  }
  return "unknown";
}

Metric metric_from_string(std::string_view name) {
  for (Metric m : {Metric::pagerank, Metric::in_degree, Metric::eigenvector,
                   Metric::node_betweenness, Metric::restrepo}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown centrality metric '" + std::string(name) + "'");
}

ConvergenceError::ConvergenceError(std::string_view what, int iterations, double residual)
    : std::runtime_error(std::string(what) + " did not converge after " + std::to_string(iterations) +
                         " iterations (residual " + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

std::vector<BankId> rank_descending(std::span<const double> scores, std::uint64_t tie_seed) {
  std::vector<BankId> order(scores.size());
  std::iota(order.begin(), order.end(), BankId{0});
  Rng rng = make_stream(tie_seed, hash_string("ties"), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(),
                   [&](BankId a, BankId b) { return scores[a] > scores[b]; });
  return order;
}

CentralityScores pagerank(const InterbankNetwork& g, std::uint64_t tie_seed, const PageRankOptions& opts) {
  const std::size_t n = g.size();
  std::vector<double> y(n, opts.beta_add), next(n);
  double residual = INFINITY;
  int it = 0;
  while (it < opts.max_iter) {
    ++it;
    residual = 0.0;
    for (BankId i = 0; i < n; ++i) {
      double s = 0.0;
      // Every lender j of i has k_j^out >= 1; dangling banks never enter a sum.
      for (BankId j : g.lenders_of(i)) s += y[j] / static_cast<double>(g.out_degree(j));
      next[i] = opts.alpha * s + opts.beta_add;
      residual = std::max(residual, std::abs(next[i] - y[i]));
    }
    y.swap(next);
    if (residual < opts.tol) return finish(Metric::pagerank, std::move(y), tie_seed);
  }
  throw ConvergenceError("pagerank", it, residual);
}

CentralityScores in_degree_scores(const InterbankNetwork& g, std::uint64_t tie_seed) {
  std::vector<double> s(g.size());
  for (BankId i = 0; i < g.size(); ++i) s[i] = static_cast<double>(g.in_degree(i));
  return finish(Metric::in_degree, std::move(s), tie_seed);
}

CentralityScores eigenvector_scores(const InterbankNetwork& g, std::uint64_t tie_seed) {
  if (!gscc_present(g)) return degenerate_scores(Metric::eigenvector, g.size(), tie_seed);
  Eigenpair u = dominant_eigenvector(g, false);
  for (double& v : u.vec) v = std::max(v, 0.0);
  return finish(Metric::eigenvector, std::move(u.vec), tie_seed);
}

CentralityScores restrepo_index(const InterbankNetwork& g, std::uint64_t tie_seed) {
  if (!gscc_present(g)) return degenerate_scores(Metric::restrepo, g.size(), tie_seed);
  const Eigenpair u = dominant_eigenvector(g, false);
  const Eigenpair v = dominant_eigenvector(g, true);
  const double vu = std::inner_product(u.vec.begin(), u.vec.end(), v.vec.begin(), 0.0);
  if (!(vu > 1e-300)) return degenerate_scores(Metric::restrepo, g.size(), tie_seed);
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::max(0.0, u.vec[i] * v.vec[i] / vu);
  return finish(Metric::restrepo, std::move(s), tie_seed);
}

Betweenness betweenness(const InterbankNetwork& g, std::span<const char> removed) {
  const std::size_t n = g.size();
  Betweenness bc;
  bc.node.assign(n, 0.0);
  bc.edge.assign(g.edge_count(), 0.0);

  std::vector<int> dist(n, -1);
  std::vector<double> sigma(n, 0.0), delta(n, 0.0);
  std::vector<BankId> visited;
  visited.reserve(n);
  std::queue<BankId> frontier;

  for (BankId s = 0; s < n; ++s) {
    if (is_removed(removed, s)) continue;
    visited.clear();
    dist[s] = 0;
    sigma[s] = 1.0;
    frontier.push(s);
    while (!frontier.empty()) {
      const BankId v = frontier.front();
      frontier.pop();
      visited.push_back(v);
      for (BankId w : g.lenders_of(v)) {
        if (is_removed(removed, w)) continue;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          frontier.push(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    for (auto it = visited.rbegin(); it != visited.rend(); ++it) {
      const BankId w = *it;
      auto preds = g.borrowers_of(w);
      auto ids = g.incoming_edge_ids(w);
      for (std::size_t k = 0; k < preds.size(); ++k) {
        const BankId v = preds[k];
        if (dist[v] < 0 || dist[v] != dist[w] - 1) continue;
        const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
        bc.edge[ids[k]] += c;
        delta[v] += c;
      }
      if (w != s) bc.node[w] += delta[w];
    }
    for (BankId v : visited) {
      dist[v] = -1;
      sigma[v] = 0.0;
      delta[v] = 0.0;
    }
  }
  return bc;
}

std::vector<double> node_betweenness(const InterbankNetwork& g) { return betweenness(g).node; }

std::vector<EdgeScore> edge_betweenness(const InterbankNetwork& g) {
  const Betweenness bc = betweenness(g);
  std::vector<EdgeScore> out;
  out.reserve(g.edge_count());
  for (std::size_t k = 0; k < g.edge_count(); ++k) out.push_back({g.edges()[k], bc.edge[k]});
  return out;
}

CentralityScores node_betweenness_scores(const InterbankNetwork& g, std::uint64_t tie_seed) {
  return finish(Metric::node_betweenness, node_betweenness(g), tie_seed);
}

CentralityScores compute_scores(const InterbankNetwork& g, Metric metric, std::uint64_t tie_seed) {
  switch (metric) {
    case Metric::pagerank: return pagerank(g, tie_seed);
    case Metric::in_degree: return in_degree_scores(g, tie_seed);
    case Metric::eigenvector: return eigenvector_scores(g, tie_seed);
    case Metric::node_betweenness: return node_betweenness_scores(g, tie_seed);
    case Metric::restrepo: return restrepo_index(g, tie_seed);
  }
  throw std::invalid_argument("unknown metric");
}

bool gscc_present(const InterbankNetwork& g, std::span<const char> removed) {
  const std::vector<char> core = cycle_core(g, removed);
  if (std::find(core.begin(), core.end(), 1) == core.end()) return false;
  const SpectralBounds b = core_bounds(g, core, 1.0, 1e-10);
  if (b.lower >= 1.0) return true;
  if (b.upper < 1.0) return false;
  return 0.5 * (b.lower + b.upper) >= 1.0 - 1e-10;
}

bool gscc_present(const InterbankNetwork& g, std::span<const BankId> removed_ids) {
  std::vector<char> removed(g.size(), 0);
  for (BankId i : removed_ids) removed.at(i) = 1;
  return gscc_present(g, std::span<const char>(removed));
}

double spectral_radius(const InterbankNetwork& g, std::span<const char> removed) {
  const std::vector<char> core = cycle_core(g, removed);
  if (std::find(core.begin(), core.end(), 1) == core.end()) return 0.0;
  const SpectralBounds b = core_bounds(g, core, std::nan(""), 1e-10);
  return 0.5 * (b.lower + b.upper);
}

void write_scores_csv(std::ostream& out, const CentralityScores& s) {
  std::vector<std::size_t> rank(s.scores.size());
  for (std::size_t r = 0; r < s.order.size(); ++r) rank[s.order[r]] = r + 1;
  out << "# metric=" << to_string(s.metric) << " tie_seed=" << s.tie_seed << '\n';
  out << "bank_id,score,rank\n";
  char buf[64];
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", s.scores[i]);
    out << i << ',' << buf << ',' << rank[i] << '\n';
  }
}

}  // namespace interbank::centrality
