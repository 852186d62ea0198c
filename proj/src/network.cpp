#include "interbank/network.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace interbank {

InterbankNetwork::InterbankNetwork(std::size_t n_banks, std::vector<Edge> edges)
    : n_banks_(n_banks), edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.borrower >= n_banks_ || e.lender >= n_banks_) {
      throw std::invalid_argument("edge (" + std::to_string(e.borrower) + ", " +
                                  std::to_string(e.lender) + ") out of range for " +
                                  std::to_string(n_banks_) + " banks");
    }
    if (e.borrower == e.lender) {
      throw std::invalid_argument("self-loop at bank " + std::to_string(e.borrower));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw std::invalid_argument("duplicate edge (" + std::to_string(dup->borrower) + ", " +
                                std::to_string(dup->lender) + ")");
  }

  row_offsets_.assign(n_banks_ + 1, 0);
  col_offsets_.assign(n_banks_ + 1, 0);
  for (const Edge& e : edges_) {
    ++row_offsets_[e.borrower + 1];
    ++col_offsets_[e.lender + 1];
  }
  for (std::size_t i = 0; i < n_banks_; ++i) {
    row_offsets_[i + 1] += row_offsets_[i];
    col_offsets_[i + 1] += col_offsets_[i];
  }
  col_borrowers_.resize(edges_.size());
  col_edge_ids_.resize(edges_.size());
  std::vector<std::uint32_t> fill(col_offsets_.begin(), col_offsets_.end() - 1);
  for (std::uint32_t id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    const std::uint32_t slot = fill[e.lender]++;
    col_borrowers_[slot] = e.borrower;
    col_edge_ids_[slot] = id;
  }
  row_lenders_.reserve(edges_.size());
  for (const Edge& e : edges_) row_lenders_.push_back(e.lender);
}

std::span<const BankId> InterbankNetwork::lenders_of(BankId borrower) const {
  return {row_lenders_.data() + row_offsets_[borrower], in_degree(borrower)};
}

std::span<const BankId> InterbankNetwork::borrowers_of(BankId lender) const {
  return {col_borrowers_.data() + col_offsets_[lender], out_degree(lender)};
}

std::span<const std::uint32_t> InterbankNetwork::incoming_edge_ids(BankId lender) const {
  return {col_edge_ids_.data() + col_offsets_[lender], out_degree(lender)};
}

bool InterbankNetwork::has_edge(BankId borrower, BankId lender) const {
  auto row = lenders_of(borrower);
  return std::binary_search(row.begin(), row.end(), lender);
}

std::uint64_t InterbankNetwork::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
      h ^= (v >> (8 * k)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  feed(n_banks_);
  for (const Edge& e : edges_) {
    feed(e.borrower);
    feed(e.lender);
  }
  return h;
}

InterbankNetwork induced_subgraph(const InterbankNetwork& g, std::span<const char> keep,
                                  std::vector<BankId>* old_ids) {
  std::vector<BankId> new_id(g.size(), 0);
  std::vector<BankId> back;
  for (BankId i = 0; i < g.size(); ++i) {
    if (keep[i]) {
      new_id[i] = static_cast<BankId>(back.size());
      back.push_back(i);
    }
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (keep[e.borrower] && keep[e.lender]) edges.push_back({new_id[e.borrower], new_id[e.lender]});
  }
  if (old_ids) *old_ids = back;
  return InterbankNetwork(back.size(), std::move(edges));
}

}  // namespace interbank
