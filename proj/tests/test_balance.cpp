#include <doctest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "interbank/balance.hpp"
#include "interbank/graphgen.hpp"

using namespace interbank;
using namespace interbank::balance;
using testing_support::from_pairs;
using testing_support::reference_risk;

TEST_CASE("incomplete-beta oracle sanity") {
  CHECK(oracle::t_cdf(0.0, 5.0) == doctest::Approx(0.5));
  // Cauchy: F(-1) = 1/4
  CHECK(oracle::t_cdf(-1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-13));
  // v = 2 closed form: F(t) = 1/2 + t / (2 sqrt(2 + t^2))
  CHECK(oracle::t_cdf(-3.0, 2.0) == doctest::Approx(0.5 - 3.0 / (2.0 * std::sqrt(11.0))).epsilon(1e-13));
}

TEST_CASE("unit net worth") {
  const double w_o = solve_unit_networth(reference_risk());
  CHECK(w_o == doctest::Approx(oracle::t_quantile(0.995, 5.0)).epsilon(1e-10));
  CHECK(oracle::t_cdf(-w_o, 5.0) == doctest::Approx(0.005).epsilon(1e-10));
  CHECK(w_o == doctest::Approx(4.032143).epsilon(1e-6));
  CHECK(unit_networth(5.0, 0.5, DistFamily::student_t) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::fabs(unit_networth(9.0, 0.5, DistFamily::normal)) < 1e-12);

  const double w_normal = unit_networth(5.0, 0.005, DistFamily::normal);
  CHECK(w_normal < w_o);
  const double sigma = std::sqrt(5.0 / 3.0);
  CHECK(oracle::normal_cdf(-w_normal, sigma) == doctest::Approx(0.005).epsilon(1e-10));
}

TEST_CASE("common-asset degrees of freedom") {
  const double w_o = solve_unit_networth(reference_risk());
  const auto t0 = std::chrono::steady_clock::now();
  const double v1 = solve_vs(w_o, 1.0 / 1000, DistFamily::student_t);
  const double v2 = solve_vs(w_o, 1.0 / 2000, DistFamily::student_t);
  const double v10 = solve_vs(w_o, 1.0 / 10000, DistFamily::student_t);
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(1));
  CHECK(v1 == doctest::Approx(10.930).epsilon(0.01 / 10.930));
  CHECK(v2 == doctest::Approx(15.687).epsilon(0.01 / 15.687));
  CHECK(v10 == doctest::Approx(47.296).epsilon(0.01 / 47.296));
  for (double d : {1.0 / 1000, 1.0 / 2000, 1.0 / 10000}) {
    const double v = solve_vs(w_o, d, DistFamily::student_t);
    CHECK(v == doctest::Approx(oracle::t_dof_for_tail(w_o, d)).epsilon(1e-7));
    CHECK(oracle::t_cdf(-w_o, v) == doctest::Approx(d).epsilon(1e-8));
  }
}

TEST_CASE("solve_vs decreases in delta_s") {
  const double w_o = solve_unit_networth(reference_risk());
  double prev = INFINITY;
  for (double d = 3e-5; d < 4e-3; d *= 1.5) {
    const double v = solve_vs(w_o, d, DistFamily::student_t);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("solve_vs names its bracket when there is no root") {
  const double w_o = solve_unit_networth(reference_risk());
  try {
    solve_vs(w_o, 1e-12, DistFamily::student_t);
    FAIL("expected failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("1e6") != std::string::npos);
  }
}

TEST_CASE("normal family stores a standard deviation") {
  auto rp = reference_risk();
  rp.family = DistFamily::normal;
  const auto cal = calibrate(rp);
  CHECK(cal.w_o == doctest::Approx(3.3253813).epsilon(1e-7));
  CHECK(oracle::normal_cdf(-cal.w_o, cal.v_s) == doctest::Approx(rp.delta_s).epsilon(1e-8));
  CHECK(cal.l_bar == doctest::Approx(3.0 * cal.w_o));
}

TEST_CASE("risk parameter validation") {
  auto rp = reference_risk();
  rp.v_r = 2.0;
  CHECK_THROWS_AS(rp.validate(), std::invalid_argument);
  rp = reference_risk();
  rp.delta_s = 0.01;
  CHECK_THROWS_AS(rp.validate(), std::invalid_argument);
  rp = reference_risk();
  rp.theta_aw = 0.0;
  CHECK_THROWS_AS(rp.validate(), std::invalid_argument);
  CHECK(family_from_string("normal") == DistFamily::normal);
  CHECK_THROWS_AS(family_from_string("cauchy"), std::invalid_argument);
}

TEST_CASE("balance sheet examples") {
  const auto rp = reference_risk();
  const auto cal = calibrate(rp);
  // 0: isolated; 1 lends to 2 (d_out(1) = 1); 3 borrows from 4 and 5 (d_in(3) = 2)
  const auto g = from_pairs(6, {{2, 1}, {3, 4}, {3, 5}});
  const auto set = build_balance_sheets(g, cal, rp);
  const double w_o = cal.w_o;

  const auto& iso = set.banks[0];
  CHECK(iso.w == doctest::Approx(w_o));
  CHECK(iso.a == doctest::Approx(7 * w_o));
  CHECK(iso.l == 0.0);
  CHECK(iso.p_bar == 0.0);
  CHECK(iso.d == doctest::Approx(6 * w_o));
  CHECK(iso.b == 0.0);
  CHECK(iso.w / iso.a == doctest::Approx(1.0 / 7.0).epsilon(1e-15));

  const auto& lender = set.banks[1];
  CHECK(lender.w == doctest::Approx(w_o));
  CHECK(lender.l == doctest::Approx(3 * w_o));
  CHECK(lender.a == doctest::Approx(7 * w_o));
  CHECK(lender.w / (lender.a + lender.l) == doctest::Approx(0.1).epsilon(1e-15));

  const auto& borrower = set.banks[3];
  CHECK(set.lending_weight(g, 3, 4) == doctest::Approx(0.5));
  CHECK(set.lending_weight(g, 3, 5) == doctest::Approx(0.5));
  CHECK(set.lending_weight(g, 3, 1) == 0.0);
  CHECK(borrower.p_bar == doctest::Approx(6 * w_o));
  // liabilities 6 w_o + w_o exceed assets 7 w_o: neither side needs topping up
  CHECK(borrower.b == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(borrower.d == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("balance sheet invariants on a generated network") {
  const auto rp = reference_risk();
  const auto cal = calibrate(rp);
  const auto g = graphgen::generate_network({2.5, 3.0, 50.0, 1000}, 8);
  const auto set = build_balance_sheets(g, cal, rp);
  double sum_l = 0.0, sum_p = 0.0;
  for (BankId i = 0; i < g.size(); ++i) {
    const auto& s = set.banks[i];
    const double lhs = s.a + s.b + s.l, rhs = s.p_bar + s.d + s.w;
    CHECK(std::fabs(lhs - rhs) <= 1e-9 * lhs);
    CHECK(s.b >= 0.0);
    CHECK(s.d >= 0.0);
    sum_l += s.l;
    sum_p += s.p_bar;
    if (s.l > 0.0) {
      CHECK(std::fabs(s.w / (s.a + s.l) - 0.1) <= 4 * std::numeric_limits<double>::epsilon());
    } else {
      CHECK(std::fabs(s.w / s.a - 1.0 / 7.0) <= 4 * std::numeric_limits<double>::epsilon());
    }
    if (g.in_degree(i) > 0) {
      double pi = 0.0;
      for (BankId j : g.lenders_of(i)) pi += set.lending_weight(g, i, j);
      CHECK(pi == doctest::Approx(1.0).epsilon(1e-12));
    }
    double owed = 0.0;
    for (BankId j : g.borrowers_of(i)) owed += set.lending_weight(g, j, i) * set.banks[j].p_bar;
    CHECK(owed == doctest::Approx(s.l).epsilon(1e-12));
  }
  CHECK(sum_l == doctest::Approx(sum_p).epsilon(1e-12));
}

TEST_CASE("balance csv layout") {
  const auto rp = reference_risk();
  const auto set = build_balance_sheets(InterbankNetwork(1, {}), calibrate(rp), rp);
  std::ostringstream out;
  write_balance_csv(out, set);
  const std::string text = out.str();
  CHECK(text.rfind("bank_id,a,b,l,p_bar,d,w,d_in,d_out\n0,", 0) == 0);
}
