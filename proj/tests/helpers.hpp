#pragma once

#include <random>
#include <vector>

#include "interbank/balance.hpp"
#include "interbank/network.hpp"
#include "oracles.hpp"

namespace testing_support {

inline interbank::InterbankNetwork to_network(const oracle::Adj& adj) {
  std::vector<interbank::Edge> edges;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    for (int v : adj[u]) edges.push_back({static_cast<interbank::BankId>(u), static_cast<interbank::BankId>(v)});
  }
  return interbank::InterbankNetwork(adj.size(), std::move(edges));
}

inline interbank::InterbankNetwork from_pairs(std::size_t n,
                                              std::vector<std::pair<interbank::BankId, interbank::BankId>> pairs) {
  std::vector<interbank::Edge> edges;
  for (auto [b, l] : pairs) edges.push_back({b, l});
  return interbank::InterbankNetwork(n, std::move(edges));
}

/// Reference risk parameters: v_r = 5, delta_r = 0.005, theta_lw = 3, theta_aw = 7.
inline interbank::balance::RiskParams reference_risk() {
  interbank::balance::RiskParams rp;
  rp.v_r = 5.0;
  rp.delta_r = 0.005;
  rp.delta_s = 0.0001;
  rp.theta_lw = 3.0;
  rp.theta_aw = 7.0;
  return rp;
}

}  // namespace testing_support
