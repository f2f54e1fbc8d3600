#pragma once

#include <cstdint>
#include <random>

namespace dts {

/// Physical and protocol constants of the single-source wireless-powered link.
///
/// All powers are in watts, energies in joules. The block duration is
/// normalized to one, so energy per block and power coincide numerically.
struct SystemParams {
  int antennas = 3;                  // AP antenna count
  double ap_power = 1.0;             // AP transmit power [W]
  double efficiency = 0.5;           // RF-to-DC conversion efficiency
  double channel_variance = 1e-5;    // per-antenna channel power gain
  double noise_power = 1e-12;        // AWGN variance at the AP [W]
  double bit_rate = 3.0;             // fixed uplink rate [bit/s/Hz]
  double capacity = 2e-5;            // battery capacity [J]
  int levels = 300;                  // number of discrete battery levels

  /// SNR threshold 2^R - 1 an uplink block must reach to carry R bits.
  double snr_threshold() const;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Random stream owned by one simulation worker; never shared.
using Rng = std::mt19937_64;

/// Pr{H > x} for H the squared norm of an N-vector with i.i.d. CN(0, omega)
/// entries, i.e. exp(-x/omega) * sum_{n<N} (x/omega)^n / n!.
/// x = +inf is accepted and maps to exactly 0.
double erlang_ccdf(double x, int antennas, double omega);

/// Draws ||h||^2 for h with i.i.d. CN(0, omega) entries.
double sample_gain(int antennas, double omega, Rng& rng);

double dbm_to_watts(double dbm);

/// Channel variance for a 30 dB loss at one metre: 1e-3 * d^-alpha.
double pathloss_variance(double distance, double alpha);

}  // namespace dts
