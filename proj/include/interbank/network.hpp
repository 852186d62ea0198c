#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace interbank {

using BankId = std::uint32_t;

/// Directed interbank edge: `borrower` borrows from `lender`, i.e. A[borrower][lender] = 1.
struct Edge {
  BankId borrower = 0;
  BankId lender = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Immutable directed interbank graph.
///
/// Edges are kept in canonical (borrower, lender) order, so the edge index of
/// an entry in `lenders_of(i)` is its position in `edges()`. Incoming lists
/// carry edge indices as well, which the betweenness code relies on.
class InterbankNetwork {
 public:
  InterbankNetwork() = default;

  /// Throws std::invalid_argument on self-loops, duplicates or ids >= n_banks.
  InterbankNetwork(std::size_t n_banks, std::vector<Edge> edges);

  std::size_t size() const { return n_banks_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  /// Banks that `borrower` borrows from (row of A).
  std::span<const BankId> lenders_of(BankId borrower) const;
  /// Banks that borrow from `lender` (column of A).
  std::span<const BankId> borrowers_of(BankId lender) const;
  /// Edge ids of the edges (b, lender), parallel to borrowers_of(lender).
  std::span<const std::uint32_t> incoming_edge_ids(BankId lender) const;
  /// First edge id of the row of `borrower`; row entries are contiguous.
  std::uint32_t row_begin(BankId borrower) const { return row_offsets_[borrower]; }

  /// Number of lenders of i (interbank liabilities count).
  std::size_t in_degree(BankId i) const { return row_offsets_[i + 1] - row_offsets_[i]; }
  /// Number of borrowers of j (interbank assets count).
  std::size_t out_degree(BankId j) const { return col_offsets_[j + 1] - col_offsets_[j]; }

  bool has_edge(BankId borrower, BankId lender) const;

  /// FNV-1a over the canonical edge list; stable across platforms.
  std::uint64_t hash() const;

  bool operator==(const InterbankNetwork& other) const {
    return n_banks_ == other.n_banks_ && edges_ == other.edges_;
  }

 private:
  std::size_t n_banks_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> row_offsets_{0};
  std::vector<BankId> row_lenders_;
  std::vector<std::uint32_t> col_offsets_{0};
  std::vector<BankId> col_borrowers_;
  std::vector<std::uint32_t> col_edge_ids_;
};

/// Subgraph induced by the banks with keep[i] != 0, relabelled densely.
/// `old_ids` receives the original id of every new node.
InterbankNetwork induced_subgraph(const InterbankNetwork& g, std::span<const char> keep,
                                  std::vector<BankId>* old_ids = nullptr);

}  // namespace interbank
