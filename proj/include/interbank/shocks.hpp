#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "interbank/balance.hpp"
#include "interbank/immunize.hpp"
#include "interbank/random.hpp"

namespace interbank::shocks {

/// One trial's external-asset shocks in w_o units: bank i defaults
/// fundamentally iff x[i] < -w_o.
struct ReturnVector {
  std::vector<double> x;
  std::uint64_t trial_id = 0;
};

/// Per-trial sampler for a fixed plan.
///
/// Draw sequence per trial: one common-asset draw, then one raw risky draw per
/// bank in id order whatever its role. Non-immunized banks and first pair
/// members use their raw draw as is; uniform-immunized banks all take the
/// common draw; the second member b of a pair (a, b) gets
///   x_b = -rho x_a + (1 - rho) h_b,  h_b = sqrt((1 + rho) / (1 - rho)) z_b,
/// so Var(x_b) = Var(x_a) and corr(x_a, x_b) = -rho (x_b = -x_a at rho = 1).
class ShockSampler {
 public:
  ShockSampler(const immunize::ImmunizationPlan& plan, const balance::RiskParams& rp,
               const balance::CalibrationResult& cal);

  void sample(Rng& rng, std::uint64_t trial_id, ReturnVector& out) const;
  ReturnVector sample(Rng& rng, std::uint64_t trial_id) const;

  std::size_t size() const { return common_.size(); }

 private:
  balance::DistFamily family_;
  double v_r_;
  double v_s_;        // t dof of the common asset, or its std under the normal family
  double sigma_r_;
  double rho_;
  std::vector<char> common_;
  std::vector<immunize::BankPair> pairs_;
};

ReturnVector sample_returns(const immunize::ImmunizationPlan& plan, const balance::RiskParams& rp,
                            const balance::CalibrationResult& cal, Rng& rng, std::uint64_t trial_id);

/// Banks with x_i < -w_o (strict), ascending.
std::vector<BankId> fundamental_default_mask(const ReturnVector& rv, const balance::CalibrationResult& cal);

/// Rows `trial,bank_id,x`; the header is written by the caller once.
void write_shocks_csv(std::ostream& out, const ReturnVector& rv);

}  // namespace interbank::shocks
