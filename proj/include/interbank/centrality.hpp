#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "interbank/network.hpp"

namespace interbank::centrality {

enum class Metric { pagerank, in_degree, eigenvector, node_betweenness, restrepo };

std::string_view to_string(Metric m);
/// Throws std::invalid_argument for unknown names.
Metric metric_from_string(std::string_view name);

/// Per-bank scores plus a descending order with randomized tie-breaking.
struct CentralityScores {
  Metric metric = Metric::pagerank;
  std::vector<double> scores;
  std::vector<BankId> order;
  std::uint64_t tie_seed = 0;
  /// Set for spectral metrics on acyclic graphs (lambda_max = 0); scores are all zero.
  bool degenerate = false;
};

struct EdgeScore {
  Edge edge;
  double betweenness = 0.0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string_view what, int iterations, double residual);
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

struct PageRankOptions {
  double alpha = 0.85;
  double beta_add = 1.0;
  double tol = 1e-12;
  int max_iter = 10000;
};

/// Bank ids sorted by descending score; equal scores are ordered by a
/// shuffle seeded with `tie_seed`.
std::vector<BankId> rank_descending(std::span<const double> scores, std::uint64_t tie_seed);

/// Fixed point of y_i = alpha * sum_j A_ij y_j / k_j^out + beta_add (unnormalised).
/// Throws ConvergenceError after max_iter sweeps.
CentralityScores pagerank(const InterbankNetwork& g, std::uint64_t tie_seed,
                          const PageRankOptions& opts = {});

CentralityScores in_degree_scores(const InterbankNetwork& g, std::uint64_t tie_seed);

/// Right dominant eigenvector of A, L2-normalised and non-negative.
CentralityScores eigenvector_scores(const InterbankNetwork& g, std::uint64_t tie_seed);

/// Dynamical importance (v_i u_i) / (v^T u) with u, v the right and left
/// dominant eigenvectors of A. Sums to 1 when lambda_max > 0.
CentralityScores restrepo_index(const InterbankNetwork& g, std::uint64_t tie_seed);

CentralityScores node_betweenness_scores(const InterbankNetwork& g, std::uint64_t tie_seed);

CentralityScores compute_scores(const InterbankNetwork& g, Metric metric, std::uint64_t tie_seed);

/// Brandes accumulation over all ordered pairs, directed hop-count distances,
/// unnormalised. Banks with removed[i] != 0 are treated as absent (empty span:
/// none removed).
struct Betweenness {
  std::vector<double> node;
  std::vector<double> edge;  ///< indexed like g.edges()
};
Betweenness betweenness(const InterbankNetwork& g, std::span<const char> removed = {});

std::vector<double> node_betweenness(const InterbankNetwork& g);
std::vector<EdgeScore> edge_betweenness(const InterbankNetwork& g);

/// Spectral GSCC test: true iff lambda_max of A restricted to the surviving
/// banks is >= 1. For 0/1 matrices without self-loops this is exactly "a
/// directed cycle survives".
bool gscc_present(const InterbankNetwork& g, std::span<const char> removed = {});
bool gscc_present(const InterbankNetwork& g, std::span<const BankId> removed_ids);

/// Dominant eigenvalue of A over the surviving banks (0 for acyclic).
double spectral_radius(const InterbankNetwork& g, std::span<const char> removed = {});

/// `# metric=<name> tie_seed=<seed>` then `bank_id,score,rank` (rank 1 = top).
void write_scores_csv(std::ostream& out, const CentralityScores& s);

}  // namespace interbank::centrality
