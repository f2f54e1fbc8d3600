#include <doctest.h>

#include <cmath>
#include <vector>

#include "dts/analysis.hpp"

using namespace dts;

namespace {

SystemParams reference_point(int levels = 300, double p_dbm = 30.0, int antennas = 3) {
  SystemParams p;
  p.antennas = antennas;
  p.ap_power = dbm_to_watts(p_dbm);
  p.channel_variance = pathloss_variance(10.0, 2.0);
  p.noise_power = dbm_to_watts(-90.0);
  p.levels = levels;
  return p;
}

}  // namespace

TEST_CASE("throughput vanishes without transmit power") {
  SystemParams p = reference_point(300, -80.0);
  const auto r = dts_throughput(p);
  CHECK(r.throughput >= 0.0);
  CHECK(r.throughput < 1e-9);
  CHECK(r.stationary.pi[0] > 1.0 - 1e-9);
}

TEST_CASE("throughput equals rate times the IT-block probability") {
  for (int levels : {1, 10, 100, 300}) {
    for (double dbm : {20.0, 30.0, 40.0}) {
      const auto r = dts_throughput(reference_point(levels, dbm));
      INFO("L=" << levels << " P=" << dbm);
      CHECK(r.throughput >= 0.0);
      CHECK(r.throughput <= 3.0);
      CHECK(r.throughput == doctest::Approx(3.0 * r.it_probability).epsilon(1e-12));
    }
  }
}

TEST_CASE("both stationary solvers give the same throughput") {
  const SystemParams p = reference_point(100);
  CHECK(dts_throughput(p, StationaryMethod::kDirect).throughput ==
        doctest::Approx(dts_throughput(p, StationaryMethod::kPowerIteration).throughput).epsilon(1e-10));
}

TEST_CASE("more antennas never hurt") {
  for (double dbm : {20.0, 30.0, 40.0}) {
    double prev = -1.0;
    for (int n = 1; n <= 6; ++n) {
      const double phi = dts_throughput(reference_point(100, dbm, n)).throughput;
      INFO("N=" << n << " P=" << dbm);
      CHECK(phi >= prev);
      prev = phi;
    }
  }
}

TEST_CASE("throughput rises with channel gain and falls with noise") {
  const SystemParams base = reference_point(100);
  double prev = -1.0;
  for (double omega : {2e-6, 5e-6, 1e-5, 2e-5, 5e-5}) {
    SystemParams p = base;
    p.channel_variance = omega;
    const double phi = dts_throughput(p).throughput;
    CHECK(phi >= prev);
    prev = phi;
  }
  prev = 4.0;
  for (double n0_dbm : {-100.0, -95.0, -90.0, -85.0, -80.0}) {
    SystemParams p = base;
    p.noise_power = dbm_to_watts(n0_dbm);
    const double phi = dts_throughput(p).throughput;
    CHECK(phi <= prev);
    prev = phi;
  }
}

TEST_CASE("throughput over the bit rate rises then falls") {
  const SystemParams p = reference_point(200);
  std::vector<double> phi;
  for (double r = 0.5; r <= 8.0 + 1e-9; r += 0.5) {
    SystemParams q = p;
    q.bit_rate = r;
    phi.push_back(dts_throughput(q).throughput);
  }
  std::size_t peak = 0;
  for (std::size_t k = 1; k < phi.size(); ++k) if (phi[k] > phi[peak]) peak = k;
  CHECK(peak > 0);
  CHECK(peak + 1 < phi.size());
  for (std::size_t k = 1; k <= peak; ++k) CHECK(phi[k] > phi[k - 1]);
  for (std::size_t k = peak + 1; k < phi.size(); ++k) CHECK(phi[k] < phi[k - 1]);
}

TEST_CASE("optimal rate matches a fine brute-force scan") {
  const SystemParams p = reference_point(200);
  const auto best = optimal_rate(p, 0.5, 10.0, 1e-3);
  CHECK_FALSE(best.boundary_optimum);
  double scan_rate = 0.0, scan_phi = -1.0;
  for (double r = 5.5; r <= 7.5; r += 0.01) {
    SystemParams q = p;
    q.bit_rate = r;
    const double phi = dts_throughput(q).throughput;
    if (phi > scan_phi) scan_phi = phi, scan_rate = r;
  }
  CHECK(std::abs(best.rate - scan_rate) <= 0.01);
  CHECK(best.throughput >= scan_phi - 1e-9);
  SystemParams q = p;
  q.bit_rate = best.rate;
  CHECK(best.throughput == doctest::Approx(dts_throughput(q).throughput).epsilon(1e-14));
}

TEST_CASE("optimal rate moves right with more power") {
  const auto low = optimal_rate(reference_point(200, 30.0), 0.5, 10.0, 1e-3);
  const auto high = optimal_rate(reference_point(200, 36.0), 0.5, 10.0, 1e-3);
  CHECK(high.rate > low.rate);
}

TEST_CASE("optimal rate edge cases") {
  const SystemParams p = reference_point(50);
  const auto single = optimal_rate(p, 2.0, 2.0, 1e-3);
  SystemParams q = p;
  q.bit_rate = 2.0;
  CHECK(single.rate == 2.0);
  CHECK(single.throughput == dts_throughput(q).throughput);
  CHECK_FALSE(single.boundary_optimum);

  const auto edge = optimal_rate(p, 0.5, 2.0, 1e-3);
  CHECK(edge.boundary_optimum);
  CHECK(edge.rate == doctest::Approx(2.0).epsilon(1e-3));

  CHECK_THROWS_AS(optimal_rate(p, 0.0, 2.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(optimal_rate(p, 3.0, 2.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(optimal_rate(p, 1.0, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("finer batteries approach the ideal throughput") {
  std::vector<double> grid;
  for (double dbm = 20; dbm <= 46; dbm += 2) grid.push_back(dbm);
  std::vector<std::vector<SweepRow>> curves;
  for (int levels : {10, 100, 300})
    curves.push_back(sweep({SweepAxis::kPowerDbm, grid, reference_point(levels)}, 4));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    INFO("P=" << grid[k]);
    CHECK(*curves[1][k].throughput >= *curves[0][k].throughput);
    CHECK(*curves[2][k].throughput >= *curves[1][k].throughput);
  }
}

TEST_CASE("capacity sweep up to the level-size turning point") {
  const std::vector<double> grid = {1e-6, 2e-6, 5e-6, 1e-5, 2e-5, 3e-5};
  const auto rows = sweep({SweepAxis::kCapacity, grid, reference_point(300)});
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(*rows[k].throughput >= *rows[k - 1].throughput);

  // With L fixed, one level grows with C; past ~3e-5 J the coarser
  // quantization costs more than the extra storage gains.
  const auto wide = sweep({SweepAxis::kCapacity, {3e-5, 1e-4, 1e-3}, reference_point(300)});
  CHECK(*wide[1].throughput < *wide[0].throughput);
  CHECK(*wide[2].throughput < *wide[1].throughput);
}

TEST_CASE("sweep bookkeeping") {
  const SystemParams base = reference_point(100);
  const auto one = sweep({SweepAxis::kPowerDbm, {30.0}, base});
  REQUIRE(one.size() == 1);
  CHECK(*one[0].throughput == dts_throughput(apply_axis(base, SweepAxis::kPowerDbm, 30.0)).throughput);

  const std::vector<double> grid = {20, 24, 28, 32, 36, 40, 44};
  const auto serial = sweep({SweepAxis::kPowerDbm, grid, base}, 1);
  const auto parallel = sweep({SweepAxis::kPowerDbm, grid, base}, 8);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(serial[k].value == grid[k]);
    CHECK(*serial[k].throughput == *parallel[k].throughput);
  }

  // A point that passes parameter validation but not matrix construction.
  const auto mixed = sweep({SweepAxis::kLevels, {10, 2500, 20}, base});
  CHECK(mixed[0].throughput.has_value());
  CHECK_FALSE(mixed[1].throughput.has_value());
  CHECK_FALSE(mixed[1].error.empty());
  CHECK(mixed[2].throughput.has_value());

  CHECK_THROWS_AS(sweep({SweepAxis::kPowerDbm, {}, base}), std::invalid_argument);
  CHECK_THROWS_AS(sweep({SweepAxis::kLevels, {2.5}, base}), std::invalid_argument);
  CHECK_THROWS_AS(sweep({SweepAxis::kCapacity, {-1.0}, base}), std::invalid_argument);
}

TEST_CASE("axis names round-trip") {
  for (auto axis : {SweepAxis::kPowerDbm, SweepAxis::kRate, SweepAxis::kCapacity,
                    SweepAxis::kLevels, SweepAxis::kAntennas})
    CHECK(parse_axis(axis_name(axis)) == axis);
  CHECK_THROWS_AS(parse_axis("distance"), std::invalid_argument);
  CHECK(apply_axis(SystemParams{}, SweepAxis::kAntennas, 4).antennas == 4);
  CHECK(apply_axis(SystemParams{}, SweepAxis::kPowerDbm, 30).ap_power == doctest::Approx(1.0));
}
