#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "dts/battery.hpp"
#include "dts/stats.hpp"

namespace dts {

enum class BatteryMode { kDiscrete, kContinuous };

struct SimConfig {
  std::uint64_t block_count = 1'000'000;
  std::uint64_t seed = 1;
  BatteryMode battery_mode = BatteryMode::kDiscrete;
  /// Blocks discarded before statistics start. Unset selects the default:
  /// 1% of the run, at least 1000 blocks but never more than a tenth of it.
  std::optional<std::uint64_t> warmup_blocks;

  std::uint64_t effective_warmup() const;
  void validate() const;
};

struct SimStats {
  double avg_throughput = 0.0;        // bits per block
  double overflow_probability = 0.0;  // over harvesting blocks only
  double it_fraction = 0.0;           // blocks carrying a successful transmission
  std::vector<double> occupancy;      // battery level at block start, L + 1 bins
  double ci_halfwidth = 0.0;          // 95%, batch means
  std::uint64_t blocks = 0;           // post-warmup blocks measured
  std::uint64_t it_blocks = 0;
  std::uint64_t eh_blocks = 0;
  std::uint64_t overflow_blocks = 0;
};

enum class BlockMode { kHarvest, kTransmit };

struct BlockTrace {
  std::uint64_t block = 0;
  BlockMode mode = BlockMode::kHarvest;
  double residual = 0.0;  // stored energy at block start [J]
  double credited = 0.0;  // bits delivered in the block
};

using TraceSink = std::function<void(const BlockTrace&)>;

/// Block-by-block simulation of the time-switching protocol, starting from an
/// empty battery. A block transmits when the stored energy covers the
/// requirement (2^R - 1) N0 / G, and otherwise harvests eta P H.
/// Discrete mode quantizes both energies onto battery levels; continuous
/// mode uses them as-is.
SimStats simulate_dts(const SystemParams& params, const SimConfig& cfg,
                      const TraceSink& trace = {});

/// Overflow probability of the time-switching protocol (EH blocks whose harvest
/// exceeds the remaining headroom).
double measure_overflow(const SystemParams& params, const SimConfig& cfg);

struct HttResult {
  double tau = 0.0;
  SimStats stats;
  std::vector<SimStats> per_tau;  // aligned with the input grid
};

/// Harvest-then-transmit baseline with a fixed split: every block harvests
/// eta P H tau into the battery, then transmits over the remaining 1 - tau if
/// the stored energy covers (1 - tau)(2^R - 1) N0 / G, crediting R (1 - tau)
/// bits. Unspent energy stays in the battery. All grid points see the same
/// channel draws; the throughput-maximizing tau is returned.
HttResult simulate_htt(const SystemParams& params, const SimConfig& cfg,
                       std::span<const double> tau_grid);

/// CSV trace writer: header `block,mode,residual,credited`.
TraceSink csv_trace_sink(std::ostream& os);

}  // namespace dts
