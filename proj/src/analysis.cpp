#include "dts/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace dts {

ThroughputResult dts_throughput(const SystemParams& params, StationaryMethod method) {
  const TransitionMatrix z = build_transition_matrix(params);
  ThroughputResult out;
  out.params = params;
  out.stationary = stationary_distribution(z, method);
  const auto& pi = out.stationary.pi;

  const int levels = params.levels;
  const double requirement_scale =
      params.snr_threshold() * params.noise_power * levels / params.capacity;
  // Level 0 cannot transmit, so the sum starts at 1.
  double success = 0.0;
  for (int i = 1; i <= levels; ++i)
    success += pi[i] * erlang_ccdf(requirement_scale / i, params.antennas, params.channel_variance);
  out.throughput = params.bit_rate * success;

  double discharge = 0.0;
  for (int i = 1; i <= levels; ++i) {
    double row = 0.0;
    for (int j = 0; j < i; ++j) row += z(i, j);
    discharge += pi[i] * row;
  }
  out.it_probability = discharge;
  return out;
}

RateOptimum optimal_rate(const SystemParams& params, double r_min, double r_max,
                         double resolution) {
  if (!(r_min > 0.0) || !(r_max >= r_min) || !std::isfinite(r_max))
    throw std::invalid_argument("optimal_rate: need 0 < r_min <= r_max");
  if (!(resolution > 0.0)) throw std::invalid_argument("optimal_rate: resolution must be > 0");

  auto phi = [&](double rate) {
    SystemParams p = params;
    p.bit_rate = rate;
    return dts_throughput(p).throughput;
  };

  if (r_min == r_max) return {r_min, phi(r_min), false};

  const double span = r_max - r_min;
  const int intervals =
      std::clamp(static_cast<int>(std::ceil(span / resolution)), 2, 40);
  std::vector<double> grid(intervals + 1);
  std::vector<double> values(intervals + 1);
  for (int k = 0; k <= intervals; ++k) {
    grid[k] = k == intervals ? r_max : r_min + span * k / intervals;
    values[k] = phi(grid[k]);
  }
  const int best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());

  RateOptimum out;
  out.boundary_optimum = best == 0 || best == intervals;
  double lo = grid[std::max(best - 1, 0)];
  double hi = grid[std::min(best + 1, intervals)];

  // Golden-section maximization over the bracket around the grid peak.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = phi(c);
  double fd = phi(d);
  while (hi - lo >= resolution) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = phi(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = phi(d);
    }
  }
  out.rate = 0.5 * (lo + hi);
  out.throughput = phi(out.rate);
  if (values[best] > out.throughput) {
    out.rate = grid[best];
    out.throughput = values[best];
  }
  return out;
}

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kPowerDbm: return "p_dbm";
    case SweepAxis::kRate: return "rate";
    case SweepAxis::kCapacity: return "capacity";
    case SweepAxis::kLevels: return "levels";
    case SweepAxis::kAntennas: return "n_antennas";
  }
  return "?";
}

SweepAxis parse_axis(std::string_view name) {
  for (auto axis : {SweepAxis::kPowerDbm, SweepAxis::kRate, SweepAxis::kCapacity,
                    SweepAxis::kLevels, SweepAxis::kAntennas}) {
    if (axis_name(axis) == name) return axis;
  }
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

SystemParams apply_axis(const SystemParams& base, SweepAxis axis, double value) {
  auto as_int = [&](const char* what) {
    if (!std::isfinite(value) || value != std::round(value) || value < 1.0 || value > 1e6)
      throw std::invalid_argument(std::string(what) + " axis needs positive integer values");
    return static_cast<int>(value);
  };
  SystemParams p = base;
  switch (axis) {
    case SweepAxis::kPowerDbm: p.ap_power = dbm_to_watts(value); break;
    case SweepAxis::kRate: p.bit_rate = value; break;
    case SweepAxis::kCapacity: p.capacity = value; break;
    case SweepAxis::kLevels: p.levels = as_int("levels"); break;
    case SweepAxis::kAntennas: p.antennas = as_int("n_antennas"); break;
  }
  return p;
}

void SweepSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (double v : grid) apply_axis(base, axis, v).validate();
}

std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  std::vector<SweepRow> rows(spec.grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      rows[k].value = spec.grid[k];
      try {
        rows[k].throughput = dts_throughput(apply_axis(spec.base, spec.axis, spec.grid[k])).throughput;
      } catch (const std::exception& e) {
        rows[k].error = e.what();
      }
    }
  };
  const unsigned count = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(rows.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
  }
  return rows;
}

}  // namespace dts
