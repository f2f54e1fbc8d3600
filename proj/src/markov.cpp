#include "dts/markov.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <limits>
#include <ostream>
#include <string>

namespace dts {

namespace {

constexpr double kEntrySlack = 1e-12;
constexpr double kRowSumTolerance = 1e-12;

void write_double(std::ostream& os, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

}  // namespace

TransitionCase classify_transition(int from, int to, int levels) {
  if (from < 0 || to < 0 || from > levels || to > levels)
    throw std::out_of_range("classify_transition: state outside [0, levels]");
  if (to < from) return TransitionCase::kDischarge;
  if (from == 0) {
    if (to == 0) return TransitionCase::kEmptyStays;
    if (to == levels) return TransitionCase::kEmptyToFull;
    return TransitionCase::kEmptyPartial;
  }
  if (from == levels) return TransitionCase::kFullStays;
  if (to == from) return TransitionCase::kHold;
  if (to == levels) return TransitionCase::kChargeToFull;
  return TransitionCase::kPartialCharge;
}

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() < 2 || p_.rows() != p_.cols())
    throw std::invalid_argument("transition matrix must be square with at least two states");
  if (p_.rows() > kMaxStates) throw std::invalid_argument("transition matrix too large");
  for (Eigen::Index i = 0; i < p_.rows(); ++i) {
    for (Eigen::Index j = 0; j < p_.cols(); ++j) {
      const double v = p_(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw NumericalError("transition entry (" + std::to_string(i) + "," + std::to_string(j) +
                             ") outside [0, 1]");
    }
    const double row = p_.row(i).sum();
    if (std::abs(row - 1.0) > kRowSumTolerance)
      throw NumericalError("transition row " + std::to_string(i) + " sums to " +
                           std::to_string(row));
  }
}

TransitionMatrix build_transition_matrix(const SystemParams& params) {
  params.validate();
  const int levels = params.levels;
  if (levels + 1 > kMaxStates)
    throw std::invalid_argument("levels + 1 exceeds " + std::to_string(kMaxStates));

  const int n = params.antennas;
  const double omega = params.channel_variance;
  // Channel-gain thresholds: one battery unit of harvest needs H > harvest_step,
  // and an IT block from level i needs G >= requirement_scale / i.
  const double harvest_step =
      params.capacity / (params.efficiency * params.ap_power * levels);
  const double requirement_scale =
      params.snr_threshold() * params.noise_power * levels / params.capacity;

  // harvest_tail[k] = Pr{H > k * harvest_step}, k = 0..L.
  std::vector<double> harvest_tail(levels + 1);
  for (int k = 0; k <= levels; ++k) harvest_tail[k] = erlang_ccdf(k * harvest_step, n, omega);
  // affordable[k] = Pr{G > requirement_scale / k}: the requirement fits in k
  // units. affordable[0] = 0 (infinite gain threshold).
  std::vector<double> affordable(levels + 1);
  affordable[0] = 0.0;
  for (int k = 1; k <= levels; ++k)
    affordable[k] = erlang_ccdf(requirement_scale / k, n, omega);

  Eigen::MatrixXd p(levels + 1, levels + 1);
  for (int i = 0; i <= levels; ++i) {
    const double harvest_mode = 1.0 - affordable[i];
    for (int j = 0; j <= levels; ++j) {
      double v = 0.0;
      switch (classify_transition(i, j, levels)) {
        case TransitionCase::kEmptyStays:
          v = 1.0 - harvest_tail[1];
          break;
        case TransitionCase::kEmptyToFull:
          v = harvest_tail[levels];
          break;
        case TransitionCase::kEmptyPartial:
          v = harvest_tail[j] - harvest_tail[j + 1];
          break;
        case TransitionCase::kHold:
          v = harvest_mode * (1.0 - harvest_tail[1]);
          break;
        case TransitionCase::kPartialCharge:
          v = harvest_mode * (harvest_tail[j - i] - harvest_tail[j - i + 1]);
          break;
        case TransitionCase::kChargeToFull:
          v = harvest_mode * harvest_tail[levels - i];
          break;
        case TransitionCase::kFullStays:
          v = harvest_mode;
          break;
        case TransitionCase::kDischarge:
          v = affordable[i - j] - affordable[i - j - 1];
          break;
      }
      if (v < -kEntrySlack || v > 1.0 + kEntrySlack || std::isnan(v))
        throw NumericalError("transition entry (" + std::to_string(i) + "," + std::to_string(j) +
                             ") = " + std::to_string(v) + " outside [0, 1]");
      p(i, j) = std::clamp(v, 0.0, 1.0);
    }
  }
  return TransitionMatrix(std::move(p));
}

StationaryDistribution stationary_distribution(const TransitionMatrix& z,
                                               StationaryMethod method,
                                               const PowerIterationOptions& options) {
  const Eigen::Index n = z.size();
  StationaryDistribution out;
  Eigen::VectorXd pi;

  if (method == StationaryMethod::kDirect) {
    Eigen::MatrixXd a = z.dense().transpose();
    a.diagonal().array() -= 1.0;
    a.array() += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    out.rcond = lu.rcond();
    if (!(out.rcond > std::numeric_limits<double>::epsilon()))
      throw NumericalError("stationary system is singular (rcond = " +
                           std::to_string(out.rcond) + "); chain may be reducible");
    pi = lu.solve(Eigen::VectorXd::Ones(n));
  } else {
    out.rcond = std::numeric_limits<double>::quiet_NaN();
    const Eigen::MatrixXd zt = z.dense().transpose();
    pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd next(n);
    bool converged = false;
    for (long it = 1; it <= options.max_iterations; ++it) {
      next.noalias() = zt * pi;
      next /= next.sum();
      const double step = (next - pi).lpNorm<Eigen::Infinity>();
      pi.swap(next);
      if (step < options.tolerance) {
        out.iterations = it;
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NumericalError("power iteration did not converge in " +
                           std::to_string(options.max_iterations) + " iterations");
  }

  if (!pi.allFinite()) throw NumericalError("stationary solve produced non-finite values");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pi(i) < -kEntrySlack)
      throw NumericalError("stationary entry " + std::to_string(i) + " is negative");
    if (pi(i) < 0.0) pi(i) = 0.0;
  }
  pi /= pi.sum();
  out.pi.assign(pi.data(), pi.data() + n);
  return out;
}

double stationarity_residual(const TransitionMatrix& z, const std::vector<double>& pi) {
  if (static_cast<int>(pi.size()) != z.size())
    throw std::invalid_argument("stationarity_residual: size mismatch");
  const Eigen::Map<const Eigen::VectorXd> v(pi.data(), z.size());
  return (z.dense().transpose() * v - v).lpNorm<Eigen::Infinity>();
}

void write_matrix_csv(std::ostream& os, const TransitionMatrix& z) {
  os << "i,j,p\n";
  for (int i = 0; i < z.size(); ++i) {
    for (int j = 0; j < z.size(); ++j) {
      os << i << ',' << j << ',';
      write_double(os, z(i, j));
      os << '\n';
    }
  }
}

void write_distribution_csv(std::ostream& os, const std::vector<double>& pi) {
  os << "i,pi\n";
  for (std::size_t i = 0; i < pi.size(); ++i) {
    os << i << ',';
    write_double(os, pi[i]);
    os << '\n';
  }
}

}  // namespace dts
