#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dts/stats.hpp"

namespace dts {

/// Raised when a computed quantity is numerically invalid: a transition entry
/// outside [0, 1], a singular stationary system, or a solver that does not
/// converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest supported chain: L + 1 <= kMaxStates (dense storage).
inline constexpr int kMaxStates = 2001;

/// The disjoint battery transitions S_i -> S_j of the protocol. Every (i, j)
/// pair falls in exactly one case.
enum class TransitionCase {
  kEmptyStays,        // S_0 -> S_0: harvest below one unit
  kEmptyToFull,       // S_0 -> S_L: harvest above capacity
  kEmptyPartial,      // S_0 -> S_i, 0 < i < L
  kHold,              // S_i -> S_i, 0 < i < L: EH block, nothing stored
  kPartialCharge,     // S_i -> S_j, 0 < i < j < L
  kChargeToFull,      // S_i -> S_L, 0 < i < L
  kFullStays,         // S_L -> S_L: requirement above capacity
  kDischarge,         // S_j -> S_i, i < j: IT block spends j - i units
};

/// Case for entry (from, to) of a chain with `levels` levels.
TransitionCase classify_transition(int from, int to, int levels);

/// Row-stochastic (L+1) x (L+1) matrix over battery levels.
class TransitionMatrix {
 public:
  /// Validates shape, entry range and row sums (1e-12).
  explicit TransitionMatrix(Eigen::MatrixXd p);

  int size() const { return static_cast<int>(p_.rows()); }
  double operator()(int from, int to) const { return p_(from, to); }
  const Eigen::MatrixXd& dense() const { return p_; }

 private:
  Eigen::MatrixXd p_;
};

/// Builds the battery chain from the eight transition cases. Entries within
/// 1e-12 of [0, 1] are clamped; anything further out throws NumericalError.
TransitionMatrix build_transition_matrix(const SystemParams& params);

enum class StationaryMethod { kDirect, kPowerIteration };

struct StationaryDistribution {
  std::vector<double> pi;
  /// Reciprocal condition estimate of the direct system (NaN for the iterate).
  double rcond = 0.0;
  /// Iterations used by power iteration (0 for the direct solve).
  long iterations = 0;
};

struct PowerIterationOptions {
  long max_iterations = 1'000'000;
  double tolerance = 1e-13;  // on ||pi_{k+1} - pi_k||_inf
};

/// Solves pi = Z^T pi, sum(pi) = 1.
///
/// kDirect solves (Z^T - I + B) pi = 1 with B all-ones by LU with partial
/// pivoting and throws NumericalError when the system is singular.
/// kPowerIteration iterates pi <- Z^T pi from the uniform vector.
StationaryDistribution stationary_distribution(
    const TransitionMatrix& z, StationaryMethod method = StationaryMethod::kDirect,
    const PowerIterationOptions& options = {});

/// ||Z^T pi - pi||_inf.
double stationarity_residual(const TransitionMatrix& z, const std::vector<double>& pi);

/// CSV dumps: header `i,j,p` (row-major, every entry) and `i,pi`.
void write_matrix_csv(std::ostream& os, const TransitionMatrix& z);
void write_distribution_csv(std::ostream& os, const std::vector<double>& pi);

}  // namespace dts
