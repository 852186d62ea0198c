#include "interbank/balance.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace interbank::balance {

namespace {

double t_cdf(double v, double x) { return boost::math::cdf(boost::math::students_t_distribution<double>(v), x); }

}  // namespace

std::string_view to_string(DistFamily f) {
  return f == DistFamily::student_t ? "student_t" : "normal";
}

DistFamily family_from_string(std::string_view name) {
  if (name == "student_t") return DistFamily::student_t;
  if (name == "normal") return DistFamily::normal;
  throw std::invalid_argument("unknown distribution family '" + std::string(name) + "'");
}

void RiskParams::validate() const {
  if (!(v_r > 2.0)) throw std::invalid_argument("v_r must exceed 2");
  if (!(delta_s > 0.0 && delta_s < delta_r && delta_r < 0.5)) {
    throw std::invalid_argument("need 0 < delta_s < delta_r < 0.5");
  }
  if (!(theta_lw > 0.0) || !(theta_aw > 0.0)) throw std::invalid_argument("theta ratios must be positive");
}

double unit_networth(double v_r, double delta_r, DistFamily family) {
  if (!(delta_r > 0.0 && delta_r < 1.0)) throw std::invalid_argument("delta_r must lie in (0, 1)");
  if (family == DistFamily::normal) {
    const double sigma = std::sqrt(v_r / (v_r - 2.0));
    return -sigma * boost::math::quantile(boost::math::normal_distribution<double>(), delta_r);
  }
  return -boost::math::quantile(boost::math::students_t_distribution<double>(v_r), delta_r);
}

double solve_unit_networth(const RiskParams& rp) {
  rp.validate();
  return unit_networth(rp.v_r, rp.delta_r, rp.family);
}

double solve_vs(double w_o, double delta_s, DistFamily family) {
  if (!(w_o > 0.0)) throw std::invalid_argument("w_o must be positive");
  if (!(delta_s > 0.0 && delta_s < 0.5)) throw std::invalid_argument("delta_s must lie in (0, 0.5)");
  if (family == DistFamily::normal) {
    return w_o / -boost::math::quantile(boost::math::normal_distribution<double>(), delta_s);
  }

  // F_v(-w_o) falls as v grows (thinner tails), so bisect on v.
  double lo = 2.0, hi = 1e6;
  const double f_lo = t_cdf(lo, -w_o) - delta_s;
  const double f_hi = t_cdf(hi, -w_o) - delta_s;
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw std::runtime_error("solve_vs: no root for delta_s=" + std::to_string(delta_s) +
                             " in the degrees-of-freedom bracket (2, 1e6)");
  }
  for (int it = 0; it < 400 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (t_cdf(mid, -w_o) > delta_s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CalibrationResult calibrate(const RiskParams& rp) {
  CalibrationResult cal;
  cal.family = rp.family;
  cal.w_o = solve_unit_networth(rp);
  cal.l_bar = rp.theta_lw * cal.w_o;
  cal.v_s = solve_vs(cal.w_o, rp.delta_s, rp.family);
  cal.sigma_r = rp.family == DistFamily::normal ? std::sqrt(rp.risky_variance()) : 1.0;
  return cal;
}

double BalanceSheetSet::lending_weight(const InterbankNetwork& g, BankId borrower, BankId lender) const {
  if (!g.has_edge(borrower, lender)) return 0.0;
  return 1.0 / static_cast<double>(banks[borrower].d_in);
}

BalanceSheetSet build_balance_sheets(const InterbankNetwork& g, const CalibrationResult& cal,
                                     const RiskParams& rp) {
  BalanceSheetSet set;
  set.w_o = cal.w_o;
  set.l_bar = cal.l_bar;
  set.banks.resize(g.size());
  for (BankId i = 0; i < g.size(); ++i) {
    BankSheet& s = set.banks[i];
    s.d_in = static_cast<std::uint32_t>(g.in_degree(i));
    s.d_out = static_cast<std::uint32_t>(g.out_degree(i));
    s.l = s.d_out * cal.l_bar;
    s.p_bar = s.d_in * cal.l_bar;
    s.w = std::max<std::uint32_t>(1, s.d_out) * cal.l_bar / rp.theta_lw;
    s.a = rp.theta_aw * s.w;
    const double liabilities = s.p_bar + s.w;
    const double assets = s.a + s.l;
    if (liabilities > assets) {
      s.b = liabilities - assets;
    } else {
      s.d = assets - liabilities;
    }
  }
  return set;
}

void write_balance_csv(std::ostream& out, const BalanceSheetSet& sheets) {
  out << "bank_id,a,b,l,p_bar,d,w,d_in,d_out\n";
  char buf[256];
  for (std::size_t i = 0; i < sheets.banks.size(); ++i) {
    const BankSheet& s = sheets.banks[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%u,%u\n", i, s.a, s.b, s.l,
                  s.p_bar, s.d, s.w, s.d_in, s.d_out);
    out << buf;
  }
}

}  // namespace interbank::balance
