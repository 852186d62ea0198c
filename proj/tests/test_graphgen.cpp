#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "interbank/graphgen.hpp"
#include "interbank/random.hpp"

using namespace interbank;
using namespace interbank::graphgen;
using testing_support::from_pairs;

namespace {

PowerLawParams reference_params() { return PowerLawParams{2.5, 3.0, 50.0, 1000}; }

}  // namespace

TEST_CASE("chung-lu constants for the standard parameters") {
  const auto k = compute_chung_lu_constants(reference_params());
  // (0.5/1.5) * 3 * 1000^(2/3) = 100; 1000 * 0.02^1.5 = 2 sqrt(2)
  CHECK(std::fabs(k.c_scale - 100.0) < 1e-12 * 100.0);
  CHECK(std::fabs(k.i0_offset - 2.0 * std::sqrt(2.0)) < 1e-12);
  CHECK(std::fabs(k.c_scale * std::pow(k.i0_offset, -2.0 / 3.0) - 50.0) < 1e-12 * 50.0);
}

TEST_CASE("offset reduces to the unit-ratio form when d equals m") {
  PowerLawParams p{2.5, 5.0, 5.0, 1000};
  const auto k = compute_chung_lu_constants(p);
  CHECK(k.i0_offset == doctest::Approx(1000.0 * std::pow(1.0 / 3.0, 1.5)).epsilon(1e-14));
}

TEST_CASE("max-degree identity holds across parameter sets") {
  for (double beta : {2.1, 2.5, 3.0, 4.0}) {
    for (double d : {1.0, 2.0, 3.0}) {
      for (double m : {10.0, 20.0, 50.0}) {
        for (std::size_t n : {1000u, 5000u, 20000u}) {
          PowerLawParams p{beta, d, m, n};
          if (m * m / (d * static_cast<double>(n)) >= 1.0) continue;
          const auto k = compute_chung_lu_constants(p);
          const double m_back = k.c_scale * std::pow(k.i0_offset, -1.0 / (beta - 1.0));
          CHECK(std::fabs(m_back - m) < 1e-12 * m);
        }
      }
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(compute_chung_lu_constants({2.0, 3.0, 50.0, 1000}), std::invalid_argument);
  CHECK_THROWS_AS(compute_chung_lu_constants({2.5, 0.5, 50.0, 1000}), std::invalid_argument);
  CHECK_THROWS_AS(compute_chung_lu_constants({2.5, 3.0, 2.0, 1000}), std::invalid_argument);
  // 55^2 / 3000 > 1
  CHECK_THROWS_AS(compute_chung_lu_constants({2.5, 3.0, 55.0, 1000}), std::invalid_argument);
  CHECK(50.0 * 50.0 / 3000.0 < 1.0);
}

TEST_CASE("degree sequences") {
  Rng rng = make_stream(7, 1, 0);
  const auto s = build_degree_sequences(reference_params(), rng);
  REQUIRE(s.d_in.size() == 1000);
  CHECK(s.d_in.front() == doctest::Approx(50.0).epsilon(1e-12));
  // value at i0 + N, one step past the last sample
  CHECK(100.0 * std::pow(s.i0_offset + 1000.0, -2.0 / 3.0) == doctest::Approx(0.99812).epsilon(1e-4));
  CHECK(s.d_in.back() == doctest::Approx(0.998778).epsilon(1e-5));

  auto sorted_in = s.d_in, sorted_out = s.d_out;
  std::sort(sorted_in.begin(), sorted_in.end());
  std::sort(sorted_out.begin(), sorted_out.end());
  CHECK(sorted_in == sorted_out);
  CHECK(s.d_out != s.d_in);
  for (double x : s.d_in) {
    CHECK(x > 0.0);
    CHECK(x <= 50.0 * (1 + 1e-12));
  }

  // Summation oracle: sum_k c (i0 + k)^(-2/3) in long double.
  long double sum = 0.0L;
  const long double i0 = 1000.0L * std::pow(0.02L, 1.5L);
  for (int k = 0; k < 1000; ++k) sum += 100.0L * std::pow(i0 + k, -2.0L / 3.0L);
  const double total = std::accumulate(s.d_in.begin(), s.d_in.end(), 0.0);
  CHECK(total == doctest::Approx(static_cast<double>(sum)).epsilon(1e-12));
  CHECK(total == doctest::Approx(2604.036).epsilon(1e-6));
}

TEST_CASE("wiring: empty weights give an empty network") {
  DegreeSequences s;
  s.d_in.assign(20, 0.0);
  s.d_out.assign(20, 0.0);
  Rng rng = make_stream(1, 2, 3);
  const auto g = wire_network(s, {2.5, 3.0, 5.0, 20}, rng);
  CHECK(g.size() == 20);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("wiring rejects probabilities at or above one") {
  DegreeSequences s;
  s.d_in = {10.0, 10.0};
  s.d_out = {10.0, 10.0};
  Rng rng = make_stream(1, 2, 3);
  CHECK_THROWS_AS(wire_network(s, {2.5, 3.0, 5.0, 10}, rng), std::invalid_argument);
}

TEST_CASE("edge counts match the binomial-sum oracle over 100 generations") {
  const auto p = reference_params();
  double realized = 0.0, expected = 0.0, variance = 0.0, mean_in = 0.0;
  std::size_t max_in = 0;
  for (int gen = 0; gen < 100; ++gen) {
    Rng rng = make_stream(99, 5, gen);
    const auto s = build_degree_sequences(p, rng);
    const auto g = wire_network(s, p, rng);
    for (std::size_t i = 0; i < s.d_in.size(); ++i) {
      for (std::size_t j = 0; j < s.d_in.size(); ++j) {
        if (i == j) continue;
        const double q = s.d_out[i] * s.d_in[j] / 3000.0;
        expected += q;
        variance += q * (1.0 - q);
      }
    }
    realized += static_cast<double>(g.edge_count());
    mean_in += static_cast<double>(g.edge_count()) / 1000.0;
    for (BankId i = 0; i < g.size(); ++i) max_in = std::max(max_in, g.in_degree(i));

    std::set<Edge> seen;
    for (const Edge& e : g.edges()) {
      CHECK(e.borrower != e.lender);
      CHECK(seen.insert(e).second);
    }
  }
  CHECK(std::fabs(realized - expected) < 3.0 * std::sqrt(variance));
  // Oracle mean in-degree is about 2.25 (sum of d_in is 2604, not 3000).
  CHECK(mean_in / 100.0 == doctest::Approx(expected / 100.0 / 1000.0).epsilon(0.01));
  CHECK(expected / 100.0 == doctest::Approx(2253.8).epsilon(0.002));
  CHECK(max_in <= 80);  // Poisson(50) realisations around the top weight
}

namespace {

/// Least-squares slope of -log CCDF against log k for k in [lo, hi].
double tail_slope(const std::function<double(std::size_t)>& ccdf, std::size_t lo, std::size_t hi) {
  std::vector<double> xs, ys;
  for (std::size_t k = lo; k <= hi; ++k) {
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(ccdf(k)));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return -sxy / sxx;
}

}  // namespace

TEST_CASE("in-degree tail follows the power law") {
  // Realised in-degrees pooled over 20 networks, against the Poisson-mixture
  // CCDF implied by the expected degrees of the same networks.
  const auto p = reference_params();
  std::vector<std::size_t> degrees;
  std::vector<double> lambdas, weights;
  for (int gen = 0; gen < 20; ++gen) {
    Rng rng = make_stream(1000 + gen, 6, 0);
    const auto s = build_degree_sequences(p, rng);
    const auto g = wire_network(s, p, rng);
    const double total_out = std::accumulate(s.d_out.begin(), s.d_out.end(), 0.0);
    for (BankId i = 0; i < g.size(); ++i) {
      degrees.push_back(g.in_degree(i));
      lambdas.push_back(s.d_in[i] * (total_out - s.d_out[i]) / 3000.0);
      weights.push_back(s.d_in[i]);
    }
  }
  auto realised = [&](std::size_t k) {
    return static_cast<double>(std::count_if(degrees.begin(), degrees.end(), [&](std::size_t d) { return d >= k; })) /
           static_cast<double>(degrees.size());
  };
  auto mixture = [&](std::size_t k) {
    double tail = 0.0;
    for (double lam : lambdas) {
      double pmf = std::exp(-lam), below = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        below += pmf;
        pmf *= lam / static_cast<double>(j + 1);
      }
      tail += std::max(0.0, 1.0 - below);
    }
    return tail / static_cast<double>(lambdas.size());
  };
  auto expected = [&](std::size_t k) {
    return static_cast<double>(std::count_if(weights.begin(), weights.end(), [&](double w) { return w >= k; })) /
           static_cast<double>(weights.size());
  };
  const double slope_real = tail_slope(realised, 3, 30);
  const double slope_mix = tail_slope(mixture, 3, 30);
  CHECK(std::fabs(slope_real - slope_mix) < 0.1);
  // The expected-degree sequence carries the beta - 1 = 1.5 tail; the finite
  // cutoff at m steepens the fit a little.
  const double slope_weights = tail_slope(expected, 3, 30);
  CHECK(slope_weights >= 1.2);
  CHECK(slope_weights <= 1.8);
}

TEST_CASE("network file round trips") {
  SUBCASE("empty") {
    const InterbankNetwork g(4, {});
    std::stringstream ss;
    write_network(ss, g);
    CHECK(ss.str() == "n_banks=4\n");
    CHECK(read_network(ss) == g);
  }
  SUBCASE("3-cycle") {
    const auto g = from_pairs(3, {{0, 1}, {1, 2}, {2, 0}});
    std::stringstream ss;
    write_network(ss, g);
    CHECK(ss.str() == "n_banks=3\n0 1\n1 2\n2 0\n");
    CHECK(read_network(ss) == g);
  }
  SUBCASE("generated") {
    const auto g = generate_network(reference_params(), 42);
    std::stringstream ss;
    write_network(ss, g);
    const auto back = read_network(ss);
    CHECK(back == g);
    CHECK(back.hash() == g.hash());
  }
}

TEST_CASE("malformed network files report the line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_network(in);
    } catch (const NetworkFormatError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("n_banks=3\n0 1\n1 x\n") == 3);
  CHECK(line_of("n_banks=3\n0 1\n1 3\n") == 3);
  CHECK(line_of("n_banks=3\n0 1\n2 2\n") == 3);
  CHECK(line_of("n_banks=3\n0 1\n1 2\n0 1\n") == 4);
  CHECK(line_of("banks=3\n") == 1);
  CHECK(line_of("n_banks=3\n0 1 \n") == 2);
}

TEST_CASE("generation is reproducible from the seed") {
  CHECK(generate_network(reference_params(), 5) == generate_network(reference_params(), 5));
  CHECK(!(generate_network(reference_params(), 5) == generate_network(reference_params(), 6)));
}
