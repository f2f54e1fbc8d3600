#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dts::oracles {

OracleReport compare_abs(std::string quantity, double oracle, double primary, double tolerance) {
  OracleReport r{std::move(quantity), oracle, primary, std::abs(oracle - primary), 0.0, tolerance,
                 false};
  r.rel_delta = oracle != 0.0 ? r.abs_delta / std::abs(oracle) : r.abs_delta;
  r.pass = r.abs_delta <= tolerance;
  return r;
}

OracleReport compare_rel(std::string quantity, double oracle, double primary, double tolerance) {
  OracleReport r = compare_abs(std::move(quantity), oracle, primary, tolerance);
  r.tolerance = tolerance;
  r.pass = r.abs_delta <= tolerance * std::abs(oracle);
  return r;
}

double ccdf_by_quadrature(double x, int antennas, double omega) {
  if (x < 0.0 || antennas < 1 || !(omega > 0.0)) throw std::domain_error("ccdf_by_quadrature");
  const double start = x / omega;
  const double shape = antennas;
  const double log_norm = std::lgamma(shape);
  // Gamma(antennas, 1) density in normalized units.
  auto density = [&](double u) {
    if (u <= 0.0) return antennas == 1 ? 1.0 : 0.0;
    return std::exp((shape - 1.0) * std::log(u) - u - log_norm);
  };
  // Panels of width ~sqrt(N) from the start. Past the mode the density is
  // log-concave and decreasing, so the remaining tail from a is at most
  // f(a) / (1 - (N - 1) / a); stop once that bound is negligible.
  const double width = std::max(1.0, std::sqrt(shape));
  double total = 0.0;
  for (double a = start;; a += width) {
    if (a > shape && density(a) / (1.0 - (shape - 1.0) / a) < 1e-18) break;
    double error = 0.0;
    const double piece = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        density, a, a + width, 15, 1e-14, &error);
    if (!(error <= 1e-12)) throw std::runtime_error("ccdf_by_quadrature: no convergence");
    total += piece;
  }
  return total;
}

std::vector<double> occupancy_by_chain_walk(const Eigen::MatrixXd& z, std::uint64_t steps,
                                            std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(z.rows());
  std::vector<std::vector<double>> cumulative(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double run = 0.0;
    for (std::size_t j = 0; j < n; ++j) cumulative[i][j] = run += z(i, j);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> counts(n, 0.0);
  std::size_t state = 0;
  for (std::uint64_t s = 0; s < steps; ++s) {
    const auto& row = cumulative[state];
    const double u = uniform(rng) * row.back();
    const auto it = std::upper_bound(row.begin(), row.end(), u);
    state = std::min(static_cast<std::size_t>(it - row.begin()), n - 1);
    counts[state] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(steps);
  return counts;
}

std::vector<double> stationary_by_gth(const Eigen::MatrixXd& z) {
  const Eigen::Index n = z.rows();
  Eigen::MatrixXd a = z;
  for (Eigen::Index k = n - 1; k > 0; --k) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) s += a(k, j);
    if (!(s > 0.0)) throw std::runtime_error("stationary_by_gth: reducible chain");
    for (Eigen::Index i = 0; i < k; ++i) a(i, k) /= s;
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) a(i, j) += a(i, k) * a(k, j);
    }
  }
  std::vector<double> pi(n);
  pi[0] = 1.0;
  double total = 1.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < j; ++i) v += pi[i] * a(i, j);
    pi[j] = v;
    total += v;
  }
  for (double& p : pi) p /= total;
  return pi;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace dts::oracles
