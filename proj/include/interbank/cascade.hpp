#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "interbank/balance.hpp"
#include "interbank/network.hpp"
#include "interbank/shocks.hpp"

namespace interbank::cascade {

struct TrialOutcome {
  std::vector<BankId> defaulted;    ///< ascending
  std::size_t n_default = 0;
  std::vector<BankId> fundamental;  ///< round-0 defaults, ascending
  std::size_t rounds = 0;           ///< propagation rounds that added a default
  bool gscc_survives = true;
};

/// Loss propagation over one network and one set of balance sheets.
///
/// Round 0 takes the fundamental defaults. A surviving bank i then defaults
/// once k_loss * l_bar * (defaulted borrowers of i) - (w_i / w_o) x_i > w_i,
/// i.e. once the balance-sheet solvency inequality with zero recovery on
/// defaulted borrowers fails. External gains offset interbank losses. Rounds
/// are synchronous.
///
/// Holds scratch buffers, so one engine per worker thread.
class CascadeEngine {
 public:
  CascadeEngine(const InterbankNetwork& g, const balance::BalanceSheetSet& sheets, double k_loss = 1.0);

  TrialOutcome run(const shocks::ReturnVector& rv);

  /// Default set only; skips the GSCC test.
  void run(const shocks::ReturnVector& rv, TrialOutcome& out, bool with_gscc);

 private:
  const InterbankNetwork* g_;
  const balance::BalanceSheetSet* sheets_;
  double k_loss_;
  bool baseline_gscc_;
  std::vector<double> loss_scale_;  // w_i / w_o
  std::vector<std::uint32_t> hits_;
  std::vector<char> defaulted_;
  std::vector<char> touched_;
  std::vector<BankId> frontier_, next_, touched_list_;
};

TrialOutcome run_cascade(const balance::BalanceSheetSet& sheets, const InterbankNetwork& g,
                         const shocks::ReturnVector& rv, double k_loss = 1.0);

/// Ground-truth checker for small instances (N <= 20). Iterates the solvency
/// inequality p_bar_i > sum_j pi_ji p_j + a~_i + b_i - d_i directly on the
/// balance sheets from the empty set and verifies the result is a fixed
/// point. Throws std::logic_error naming the first offending bank otherwise.
TrialOutcome cascade_oracle(const balance::BalanceSheetSet& sheets, const InterbankNetwork& g,
                            const shocks::ReturnVector& rv, double k_loss = 1.0);

/// True iff bank i violates the solvency inequality when the banks flagged in
/// `defaulted` pay (1 - k_loss) of their interbank liabilities.
bool insolvent_given(const balance::BalanceSheetSet& sheets, const InterbankNetwork& g,
                     const shocks::ReturnVector& rv, double k_loss, std::span<const char> defaulted, BankId i);

/// Checks that `defaulted` is closed: every member is insolvent given the set
/// and no outsider is. Returns a description of the first violation.
std::optional<std::string> check_fixed_point(const balance::BalanceSheetSet& sheets, const InterbankNetwork& g,
                                             const shocks::ReturnVector& rv, double k_loss,
                                             std::span<const BankId> defaulted);

/// `trial,n_default,n_fundamental,rounds,gscc_survives`
void write_outcome_header(std::ostream& out);
void write_outcome_row(std::ostream& out, std::uint64_t trial, const TrialOutcome& o);

}  // namespace interbank::cascade
