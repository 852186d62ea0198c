#include "interbank/shocks.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace interbank::shocks {

using balance::DistFamily;

ShockSampler::ShockSampler(const immunize::ImmunizationPlan& plan, const balance::RiskParams& rp,
                           const balance::CalibrationResult& cal)
    : family_(cal.family),
      v_r_(rp.v_r),
      v_s_(cal.v_s),
      sigma_r_(cal.sigma_r),
      rho_(plan.pairs.rho),
      common_(plan.n_banks, 0),
      pairs_(plan.pairs.pairs) {
  if (!(rho_ >= 0.0 && rho_ <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
  std::vector<char> used(plan.n_banks, 0);
  for (BankId i : plan.uniform_set) {
    if (i >= plan.n_banks || used[i]) throw std::invalid_argument("invalid uniform set");
    used[i] = 1;
    common_[i] = 1;
  }
  for (const auto& [a, b] : pairs_) {
    if (a >= plan.n_banks || b >= plan.n_banks || a == b || used[a] || used[b]) {
      throw std::invalid_argument("pairs must be disjoint and distinct from the uniform set");
    }
    used[a] = used[b] = 1;
  }
}

void ShockSampler::sample(Rng& rng, std::uint64_t trial_id, ReturnVector& out) const {
  const std::size_t n = common_.size();
  out.trial_id = trial_id;
  out.x.resize(n);

  double shared = 0.0;
  if (family_ == DistFamily::student_t) {
    std::student_t_distribution<double> common_dist(v_s_);
    shared = common_dist(rng);
    std::student_t_distribution<double> risky(v_r_);
    for (std::size_t i = 0; i < n; ++i) out.x[i] = risky(rng);
  } else {
    std::normal_distribution<double> common_dist(0.0, v_s_);
    shared = common_dist(rng);
    std::normal_distribution<double> risky(0.0, sigma_r_);
    for (std::size_t i = 0; i < n; ++i) out.x[i] = risky(rng);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (common_[i]) out.x[i] = shared;
  }
  if (rho_ >= 1.0) {
    for (const auto& [a, b] : pairs_) out.x[b] = -out.x[a];
  } else {
    const double h_scale = std::sqrt((1.0 + rho_) / (1.0 - rho_));
    for (const auto& [a, b] : pairs_) out.x[b] = -rho_ * out.x[a] + (1.0 - rho_) * (h_scale * out.x[b]);
  }
}

ReturnVector ShockSampler::sample(Rng& rng, std::uint64_t trial_id) const {
  ReturnVector rv;
  sample(rng, trial_id, rv);
  return rv;
}

ReturnVector sample_returns(const immunize::ImmunizationPlan& plan, const balance::RiskParams& rp,
                            const balance::CalibrationResult& cal, Rng& rng, std::uint64_t trial_id) {
  return ShockSampler(plan, rp, cal).sample(rng, trial_id);
}

std::vector<BankId> fundamental_default_mask(const ReturnVector& rv, const balance::CalibrationResult& cal) {
  std::vector<BankId> out;
  for (std::size_t i = 0; i < rv.x.size(); ++i) {
    if (rv.x[i] < -cal.w_o) out.push_back(static_cast<BankId>(i));
  }
  return out;
}

void write_shocks_csv(std::ostream& out, const ReturnVector& rv) {
  char buf[96];
  for (std::size_t i = 0; i < rv.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%llu,%zu,%.17g\n", static_cast<unsigned long long>(rv.trial_id), i, rv.x[i]);
    out << buf;
  }
}

}  // namespace interbank::shocks
