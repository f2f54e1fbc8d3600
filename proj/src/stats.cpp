#include "dts/stats.hpp"

#include <cmath>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace dts {

double SystemParams::snr_threshold() const { return std::exp2(bit_rate) - 1.0; }

void SystemParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (antennas < 1) throw std::invalid_argument("antennas must be >= 1");
  if (!positive(ap_power)) throw std::invalid_argument("ap_power must be positive");
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw std::invalid_argument("efficiency must lie in (0, 1]");
  if (!positive(channel_variance))
    throw std::invalid_argument("channel_variance must be positive");
  if (!positive(noise_power)) throw std::invalid_argument("noise_power must be positive");
  if (!positive(bit_rate)) throw std::invalid_argument("bit_rate must be positive");
  if (!positive(capacity)) throw std::invalid_argument("capacity must be positive");
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
}

double erlang_ccdf(double x, int antennas, double omega) {
  if (std::isnan(x) || x < 0.0) throw std::domain_error("erlang_ccdf: x must be >= 0");
  if (antennas < 1) throw std::domain_error("erlang_ccdf: antennas must be >= 1");
  if (!(omega > 0.0)) throw std::domain_error("erlang_ccdf: omega must be > 0");
  if (std::isinf(x)) return 0.0;

  const double u = x / omega;
  // Each term is a Poisson(u) mass e^-u u^n / n!, advanced by the recurrence
  // t_{n+1} = t_n * u / (n + 1) so that neither u^n nor n! is ever formed.
  double sum = 0.0;
  if (u < 700.0) {
    double term = std::exp(-u);
    sum = term;
    for (int n = 1; n < antennas; ++n) {
      term *= u / n;
      sum += term;
    }
  } else {
    // exp(-u) underflows; accumulate the same terms in log space.
    double log_term = -u;
    for (int n = 0; n < antennas; ++n) {
      if (n > 0) log_term += std::log(u / n);
      sum += std::exp(log_term);
    }
  }
  return std::min(1.0, std::max(0.0, sum));
}

double sample_gain(int antennas, double omega, Rng& rng) {
  if (antennas < 1) throw std::domain_error("sample_gain: antennas must be >= 1");
  if (!(omega > 0.0)) throw std::domain_error("sample_gain: omega must be > 0");
  // Real and imaginary parts each carry half the per-antenna power.
  std::normal_distribution<double> normal(0.0, std::sqrt(omega / 2.0));
  double gain = 0.0;
  for (int k = 0; k < antennas; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    gain += re * re + im * im;
  }
  return gain;
}

double dbm_to_watts(double dbm) {
  if (!std::isfinite(dbm)) throw std::domain_error("dbm_to_watts: non-finite input");
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double pathloss_variance(double distance, double alpha) {
  if (!(distance > 0.0) || !std::isfinite(distance))
    throw std::domain_error("pathloss_variance: distance must be > 0");
  if (!(alpha >= 2.0 && alpha <= 5.0))
    throw std::domain_error("pathloss_variance: alpha must lie in [2, 5]");
  return 1e-3 * std::pow(distance, -alpha);
}

}  // namespace dts
