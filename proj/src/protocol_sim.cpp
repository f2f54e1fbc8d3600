#include "dts/protocol_sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace dts {

namespace {

constexpr std::uint64_t kBatches = 100;

// Battery seen by the simulator: integer levels in discrete mode, joules in
// continuous mode.
class SimBattery {
 public:
  SimBattery(BatteryMode mode, BatteryConfig cfg) : mode_(mode), cfg_(cfg) {}

  double stored() const {
    return mode_ == BatteryMode::kDiscrete ? level_energy(EnergyLevel(level_), cfg_) : energy_;
  }

  int bin() const {
    if (mode_ == BatteryMode::kDiscrete) return level_;
    const double b = std::floor(energy_ / cfg_.unit());
    return static_cast<int>(std::min(b, static_cast<double>(cfg_.levels)));
  }

  // Debits the requirement when the battery covers it.
  bool try_spend(double required) {
    if (mode_ == BatteryMode::kDiscrete) {
      const EnergyLevel need = quantize_requirement(required, cfg_);
      if (!need.feasible() || level_ < need.index()) return false;
      level_ -= need.index();
      assert(level_ >= 0);
      return true;
    }
    if (energy_ < required) return false;
    energy_ -= required;
    return true;
  }

  // Stores harvested energy, truncating at capacity. Returns true on overflow.
  bool charge(double harvested) {
    if (mode_ == BatteryMode::kDiscrete) {
      const int gained = quantize_harvest(harvested, cfg_).index();
      const bool overflow = level_ + gained > cfg_.levels;
      level_ = std::min(level_ + gained, cfg_.levels);
      return overflow;
    }
    const bool overflow = energy_ + harvested > cfg_.capacity;
    energy_ = std::min(energy_ + harvested, cfg_.capacity);
    assert(energy_ >= 0.0 && energy_ <= cfg_.capacity);
    return overflow;
  }

 private:
  BatteryMode mode_;
  BatteryConfig cfg_;
  int level_ = 0;
  double energy_ = 0.0;
};

// Post-warmup bookkeeping for one protocol instance.
class Recorder {
 public:
  Recorder(std::uint64_t measured_blocks, int levels)
      : batches_(std::min<std::uint64_t>(kBatches, measured_blocks)),
        batch_size_(measured_blocks / std::max<std::uint64_t>(batches_, 1)),
        batch_bits_(batches_, 0.0),
        occupancy_(levels + 1, 0) {}

  void record(int bin, bool transmitted, double credited, bool harvested, bool overflow) {
    ++occupancy_[bin];
    if (transmitted) ++it_blocks_;
    if (harvested) ++eh_blocks_;
    if (overflow) ++overflow_blocks_;
    if (batches_ > 0) {
      const std::uint64_t b = index_ / batch_size_;
      if (b < batches_) batch_bits_[b] += credited;
    }
    ++index_;
  }

  // `bits_per_success` converts it_fraction into throughput.
  SimStats finish(double bits_per_success) const {
    SimStats s;
    s.blocks = index_;
    s.it_blocks = it_blocks_;
    s.eh_blocks = eh_blocks_;
    s.overflow_blocks = overflow_blocks_;
    const double n = static_cast<double>(index_);
    s.it_fraction = static_cast<double>(it_blocks_) / n;
    s.avg_throughput = bits_per_success * s.it_fraction;
    s.overflow_probability =
        eh_blocks_ == 0 ? 0.0 : static_cast<double>(overflow_blocks_) / eh_blocks_;
    s.occupancy.resize(occupancy_.size());
    for (std::size_t i = 0; i < occupancy_.size(); ++i)
      s.occupancy[i] = static_cast<double>(occupancy_[i]) / n;

    if (batches_ >= 2) {
      double mean = 0.0;
      for (double bits : batch_bits_) mean += bits / batch_size_;
      mean /= batches_;
      double ss = 0.0;
      for (double bits : batch_bits_) {
        const double d = bits / batch_size_ - mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / (batches_ - 1));
      const boost::math::students_t dist(static_cast<double>(batches_ - 1));
      const double t = boost::math::quantile(dist, 0.975);
      s.ci_halfwidth = t * sd / std::sqrt(static_cast<double>(batches_));
    } else {
      s.ci_halfwidth = std::numeric_limits<double>::infinity();
    }
    return s;
  }

 private:
  std::uint64_t batches_;
  std::uint64_t batch_size_;
  std::vector<double> batch_bits_;
  std::vector<std::uint64_t> occupancy_;
  std::uint64_t index_ = 0;
  std::uint64_t it_blocks_ = 0;
  std::uint64_t eh_blocks_ = 0;
  std::uint64_t overflow_blocks_ = 0;
};

struct ChannelDraw {
  double downlink;  // H
  double uplink;    // G
};

// Both gains are drawn every block, whatever the mode, so that runs sharing a
// seed see identical channels.
ChannelDraw draw_channels(const SystemParams& params, Rng& rng) {
  const double h = sample_gain(params.antennas, params.channel_variance, rng);
  const double g = sample_gain(params.antennas, params.channel_variance, rng);
  return {h, g};
}

double transmit_energy(const SystemParams& params, double uplink_gain) {
  return params.snr_threshold() * params.noise_power / uplink_gain;
}

}  // namespace

std::uint64_t SimConfig::effective_warmup() const {
  if (warmup_blocks) return *warmup_blocks;
  return std::max(block_count / 100, std::min<std::uint64_t>(1000, block_count / 10));
}

void SimConfig::validate() const {
  if (block_count < 1) throw std::invalid_argument("block_count must be >= 1");
  if (effective_warmup() >= block_count)
    throw std::invalid_argument("warmup_blocks must be smaller than block_count");
}

SimStats simulate_dts(const SystemParams& params, const SimConfig& cfg, const TraceSink& trace) {
  params.validate();
  cfg.validate();
  const BatteryConfig battery_cfg{params.capacity, params.levels};
  const std::uint64_t warmup = cfg.effective_warmup();

  Rng rng(cfg.seed);
  SimBattery battery(cfg.battery_mode, battery_cfg);
  Recorder recorder(cfg.block_count - warmup, params.levels);

  for (std::uint64_t m = 0; m < cfg.block_count; ++m) {
    const ChannelDraw ch = draw_channels(params, rng);
    const int bin = battery.bin();
    const double residual = trace ? battery.stored() : 0.0;

    const bool transmit = battery.try_spend(transmit_energy(params, ch.uplink));
    bool overflow = false;
    if (!transmit) overflow = battery.charge(params.efficiency * params.ap_power * ch.downlink);
    const double credited = transmit ? params.bit_rate : 0.0;

    if (m >= warmup) recorder.record(bin, transmit, credited, !transmit, overflow);
    if (trace)
      trace({m, transmit ? BlockMode::kTransmit : BlockMode::kHarvest, residual, credited});
  }
  return recorder.finish(params.bit_rate);
}

double measure_overflow(const SystemParams& params, const SimConfig& cfg) {
  return simulate_dts(params, cfg).overflow_probability;
}

HttResult simulate_htt(const SystemParams& params, const SimConfig& cfg,
                       std::span<const double> tau_grid) {
  params.validate();
  cfg.validate();
  if (tau_grid.empty()) throw std::invalid_argument("tau grid is empty");
  for (double tau : tau_grid) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau values must lie in (0, 1)");
  }
  const BatteryConfig battery_cfg{params.capacity, params.levels};
  const std::uint64_t warmup = cfg.effective_warmup();

  std::vector<SimBattery> batteries(tau_grid.size(), SimBattery(cfg.battery_mode, battery_cfg));
  std::vector<Recorder> recorders(tau_grid.size(),
                                  Recorder(cfg.block_count - warmup, params.levels));
  Rng rng(cfg.seed);
  for (std::uint64_t m = 0; m < cfg.block_count; ++m) {
    const ChannelDraw ch = draw_channels(params, rng);
    const double full_block_harvest = params.efficiency * params.ap_power * ch.downlink;
    const double full_block_requirement = transmit_energy(params, ch.uplink);
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
      const double tau = tau_grid[k];
      SimBattery& battery = batteries[k];
      const int bin = battery.bin();
      const bool overflow = battery.charge(full_block_harvest * tau);
      const bool transmit = battery.try_spend(full_block_requirement * (1.0 - tau));
      const double credited = transmit ? params.bit_rate * (1.0 - tau) : 0.0;
      if (m >= warmup) recorders[k].record(bin, transmit, credited, true, overflow);
    }
  }

  HttResult out;
  out.per_tau.reserve(tau_grid.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    out.per_tau.push_back(recorders[k].finish(params.bit_rate * (1.0 - tau_grid[k])));
    if (out.per_tau[k].avg_throughput > out.per_tau[best].avg_throughput) best = k;
  }
  out.tau = tau_grid[best];
  out.stats = out.per_tau[best];
  return out;
}

TraceSink csv_trace_sink(std::ostream& os) {
  os << "block,mode,residual,credited\n";
  return [&os](const BlockTrace& t) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%llu,%s,%.17g,%.17g\n",
                  static_cast<unsigned long long>(t.block),
                  t.mode == BlockMode::kTransmit ? "IT" : "EH", t.residual, t.credited);
    os << buf;
  };
}

}  // namespace dts
