#pragma once

// Independent reference implementations used only by the tests. None of them
// shares code with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Student-t CDF through the regularized incomplete beta function
// (continued fraction, modified Lentz).

inline double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m < 10000; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    f *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double step = d * c;
    f *= step;
    if (std::fabs(step - 1.0) < 1e-16) break;
  }
  return f;
}

inline double inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_cf(b, a, 1.0 - x) / b;
}

inline double t_cdf(double t, double v) {
  const double x = v / (v + t * t);
  const double tail = 0.5 * inc_beta(v / 2.0, 0.5, x);
  return t < 0.0 ? tail : 1.0 - tail;
}

inline double normal_cdf(double z, double sigma = 1.0) { return 0.5 * std::erfc(-z / (sigma * std::sqrt(2.0))); }

/// Root of an increasing function on [lo, hi] by bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  for (int k = 0; k < iters; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double t_quantile(double p, double v) {
  return bisect([&](double t) { return t_cdf(t, v) - p; }, -1e3, 1e3);
}

/// v with F_v(-w) = delta; F_v(-w) falls as v grows.
inline double t_dof_for_tail(double w, double delta) {
  return bisect([&](double v) { return delta - t_cdf(-w, v); }, 2.0, 1e6, 300);
}

// ---------------------------------------------------------------------------
// Graphs as adjacency lists: adj[u] = successors of u (edge u -> v).

using Adj = std::vector<std::vector<int>>;

/// Tarjan SCC; true iff some strongly connected component has >= 2 nodes.
inline bool has_nontrivial_scc(const Adj& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  int counter = 0;
  bool found = false;
  std::function<void(int)> visit = [&](int u) {
    index[u] = low[u] = counter++;
    stack.push_back(u);
    on_stack[u] = 1;
    for (int v : adj[u]) {
      if (index[v] < 0) {
        visit(v);
        low[u] = std::min(low[u], low[v]);
      } else if (on_stack[v]) {
        low[u] = std::min(low[u], index[v]);
      }
    }
    if (low[u] == index[u]) {
      int size = 0;
      for (;;) {
        const int w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        ++size;
        if (w == u) break;
      }
      if (size >= 2) found = true;
    }
  };
  for (int u = 0; u < n; ++u) {
    if (index[u] < 0) visit(u);
  }
  return found;
}

/// Largest |eigenvalue| of a dense 0/1 matrix, via Eigen's general solver.
inline double spectral_radius(const Adj& adj) {
  const int n = static_cast<int>(adj.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v : adj[u]) a(u, v) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  double best = 0.0;
  for (int k = 0; k < n; ++k) best = std::max(best, std::abs(es.eigenvalues()[k]));
  return best;
}

/// Brute-force betweenness: enumerate every shortest path of every ordered
/// pair (s, t) with t reachable from s, and give each path 1/(#paths) credit.
struct BruteBetweenness {
  std::vector<double> node;
  std::map<std::pair<int, int>, double> edge;
};

inline BruteBetweenness brute_betweenness(const Adj& adj) {
  const int n = static_cast<int>(adj.size());
  BruteBetweenness out;
  out.node.assign(n, 0.0);
  for (int u = 0; u < n; ++u) {
    for (int v : adj[u]) out.edge[{u, v}] = 0.0;
  }
  for (int s = 0; s < n; ++s) {
    // hop distances from s
    std::vector<int> dist(n, -1);
    std::vector<int> queue{s};
    dist[s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      for (int v : adj[queue[h]]) {
        if (dist[v] < 0) {
          dist[v] = dist[queue[h]] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int t = 0; t < n; ++t) {
      if (t == s || dist[t] < 0) continue;
      std::vector<std::vector<int>> paths;
      std::vector<int> path{s};
      std::function<void(int)> walk = [&](int u) {
        if (u == t) {
          paths.push_back(path);
          return;
        }
        for (int v : adj[u]) {
          if (static_cast<int>(path.size()) <= dist[t] && dist[v] == static_cast<int>(path.size())) {
            path.push_back(v);
            walk(v);
            path.pop_back();
          }
        }
      };
      walk(s);
      const double share = 1.0 / static_cast<double>(paths.size());
      for (const auto& p : paths) {
        for (std::size_t k = 1; k + 1 < p.size(); ++k) out.node[p[k]] += share;
        for (std::size_t k = 0; k + 1 < p.size(); ++k) out.edge[{p[k], p[k + 1]}] += share;
      }
    }
  }
  return out;
}

/// Random simple digraph without self-loops, each arc present with probability p.
template <class Gen>
Adj random_digraph(int n, double p, Gen& gen) {
  std::bernoulli_distribution coin(p);
  Adj adj(n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u != v && coin(gen)) adj[u].push_back(v);
    }
  }
  return adj;
}

}  // namespace oracle
