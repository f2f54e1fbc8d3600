#include <doctest.h>

#include <cmath>
#include <limits>

#include "dts/markov.hpp"
#include "dts/stats.hpp"
#include "oracles.hpp"

using namespace dts;
using namespace dts::oracles;

TEST_CASE("quadrature ccdf at zero is one") {
  for (int n : {1, 2, 5, 8}) CHECK(ccdf_by_quadrature(0.0, n, 3e-4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadrature ccdf matches the closed form at 3 omega") {
  const double omega = 1e-5;
  const auto r = compare_abs("ccdf(3 omega, N=3)", ccdf_by_quadrature(3 * omega, 3, omega),
                             erlang_ccdf(3 * omega, 3, omega), 1e-9);
  CHECK(r.pass);
}

TEST_CASE("deep tail values are both negligible") {
  const double omega = 1e-5;
  const double q = ccdf_by_quadrature(50 * omega, 2, omega);
  const double c = erlang_ccdf(50 * omega, 2, omega);
  CHECK(q <= 1e-15);
  CHECK(c <= 1e-15);
  CHECK(std::abs(q - c) < 1e-14);
}

TEST_CASE("chain walk on a symmetric two-state chain") {
  Eigen::MatrixXd z(2, 2);
  z << 0.5, 0.5, 0.5, 0.5;
  const auto occ = occupancy_by_chain_walk(z, 1'000'000, 3);
  CHECK(occ[0] == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(occ[0] - 0.5) <= 0.005);
  CHECK(std::abs(occ[1] - 0.5) <= 0.005);
}

TEST_CASE("chain walk concentrates on a nearly absorbing state") {
  Eigen::MatrixXd z(3, 3);
  z << 1.0 - 1e-6, 1e-6, 0.0,
       0.5, 0.0, 0.5,
       0.9, 0.1, 0.0;
  const auto occ = occupancy_by_chain_walk(z, 200'000, 11);
  CHECK(occ[0] > 0.99);
}

TEST_CASE("GTH reduction solves a known three-state chain") {
  // Birth-death chain with detailed balance: pi proportional to (1, 2, 4).
  Eigen::MatrixXd z(3, 3);
  z << 0.8, 0.2, 0.0,
       0.1, 0.7, 0.2,
       0.0, 0.1, 0.9;
  const auto pi = stationary_by_gth(z);
  CHECK(pi[0] == doctest::Approx(1.0 / 7));
  CHECK(pi[1] == doctest::Approx(2.0 / 7));
  CHECK(pi[2] == doctest::Approx(4.0 / 7));
}

TEST_CASE("oracle reports flag deltas against the tolerance") {
  CHECK(compare_abs("a", 1.0, 1.0 + 1e-10, 1e-9).pass);
  CHECK_FALSE(compare_abs("a", 1.0, 1.0 + 1e-8, 1e-9).pass);
  const auto r = compare_rel("b", 2.0, 2.01, 0.01);
  CHECK(r.pass);
  CHECK(r.rel_delta == doctest::Approx(0.005));
  CHECK_FALSE(compare_rel("b", 2.0, 2.05, 0.01).pass);
}

TEST_CASE("total variation distance") {
  CHECK(total_variation({0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK(total_variation({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
  CHECK_THROWS(total_variation({1.0}, {0.5, 0.5}));
}
