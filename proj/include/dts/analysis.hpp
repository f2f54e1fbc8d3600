#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dts/markov.hpp"
#include "dts/stats.hpp"

namespace dts {

/// Long-run throughput of the time-switching protocol, in bits per
/// normalized block.
struct ThroughputResult {
  double throughput = 0.0;
  /// Stationary probability of an IT block, taken from the discharge mass of
  /// the transition matrix rather than from the throughput sum.
  double it_probability = 0.0;
  StationaryDistribution stationary;
  SystemParams params;
};

/// R * sum_{i>=1} pi_i * Pr{G >= (2^R - 1) N0 L / (i C)}.
ThroughputResult dts_throughput(const SystemParams& params,
                                StationaryMethod method = StationaryMethod::kDirect);

struct RateOptimum {
  double rate = 0.0;
  double throughput = 0.0;
  /// The coarse-grid maximum sat at r_min or r_max.
  bool boundary_optimum = false;
};

/// Maximizes dts_throughput over the bit rate in [r_min, r_max]: a coarse
/// grid locates the peak, golden-section search refines the bracketing
/// interval until it is narrower than `resolution`.
RateOptimum optimal_rate(const SystemParams& params, double r_min, double r_max,
                         double resolution);

enum class SweepAxis { kPowerDbm, kRate, kCapacity, kLevels, kAntennas };

std::string_view axis_name(SweepAxis axis);
/// Accepts the names produced by axis_name; throws std::invalid_argument.
SweepAxis parse_axis(std::string_view name);

/// Returns `base` with the axis parameter replaced by `value`.
SystemParams apply_axis(const SystemParams& base, SweepAxis axis, double value);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kPowerDbm;
  std::vector<double> grid;
  SystemParams base;
  void validate() const;
};

struct SweepRow {
  double value = 0.0;
  std::optional<double> throughput;
  std::string error;  // set when the point failed
};

/// Evaluates every grid point independently, on up to `threads` workers.
/// Rows come back in grid order; a failing point records its error.
std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads = 1);

}  // namespace dts
