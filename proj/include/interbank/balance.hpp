#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "interbank/network.hpp"

namespace interbank::balance {

enum class DistFamily { student_t, normal };

std::string_view to_string(DistFamily f);
DistFamily family_from_string(std::string_view name);

struct RiskParams {
  double v_r = 5.0;           ///< t degrees of freedom of the idiosyncratic risky asset
  double delta_r = 0.005;     ///< fundamental default probability, risky asset
  double delta_s = 0.0001;    ///< fundamental default probability, common low-risk asset
  double theta_lw = 3.0;      ///< interbank assets / net worth
  double theta_aw = 7.0;      ///< external assets / net worth
  DistFamily family = DistFamily::student_t;

  /// Throws std::invalid_argument unless v_r > 2, 0 < delta_s < delta_r < 0.5
  /// and both thetas are positive.
  void validate() const;

  /// Var of one risky draw: v_r/(v_r-2). The normal family matches it.
  double risky_variance() const { return v_r / (v_r - 2.0); }
};

/// Calibrated scale of the model, in the units of the return draws.
struct CalibrationResult {
  DistFamily family = DistFamily::student_t;
  double w_o = 0.0;      ///< net worth of an out-degree-one bank
  double l_bar = 0.0;    ///< exposure carried by every edge, theta_lw * w_o
  /// student_t: degrees of freedom of the common asset.
  /// normal: standard deviation of the common asset.
  double v_s = 0.0;
  double sigma_r = 1.0;  ///< normal family only: std of the risky asset
};

/// w_o with F(-w_o) = delta_r; delta_r in (0, 1). Under the normal family F is
/// the variance-matched normal N(0, v_r/(v_r-2)).
double unit_networth(double v_r, double delta_r, DistFamily family);
double solve_unit_networth(const RiskParams& rp);

/// Degrees of freedom v_s in (2, 1e6) with F_{v_s}(-w_o) = delta_s (student_t),
/// or the standard deviation sigma_s with Phi(-w_o/sigma_s) = delta_s (normal).
/// Throws std::runtime_error naming the bracket when no root exists.
double solve_vs(double w_o, double delta_s, DistFamily family);

CalibrationResult calibrate(const RiskParams& rp);

struct BankSheet {
  double a = 0.0;      ///< external asset
  double b = 0.0;      ///< riskless asset
  double l = 0.0;      ///< interbank assets
  double p_bar = 0.0;  ///< interbank liabilities
  double d = 0.0;      ///< deposits
  double w = 0.0;      ///< net worth
  std::uint32_t d_in = 0;
  std::uint32_t d_out = 0;
};

struct BalanceSheetSet {
  std::vector<BankSheet> banks;
  double w_o = 0.0;
  double l_bar = 0.0;

  std::size_t size() const { return banks.size(); }
  /// pi_ij: share of borrower i's interbank liabilities owed to lender j.
  double lending_weight(const InterbankNetwork& g, BankId borrower, BankId lender) const;
};

/// Unit exposure on every edge: l_i = d_out l_bar, p_bar_i = d_in l_bar,
/// w_i = max(1, d_out) l_bar / theta_lw, a_i = theta_aw w_i. The riskless
/// asset closes a liability-heavy sheet, deposits close the rest.
BalanceSheetSet build_balance_sheets(const InterbankNetwork& g, const CalibrationResult& cal,
                                     const RiskParams& rp);

/// `bank_id,a,b,l,p_bar,d,w,d_in,d_out`
void write_balance_csv(std::ostream& out, const BalanceSheetSet& sheets);

}  // namespace interbank::balance
