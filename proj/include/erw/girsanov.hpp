#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "erw/environment.hpp"
#include "erw/trajectory.hpp"

namespace erw {

/// Log-space product accumulator for the change-of-measure weights. beta = +-1
/// cookies make factors exactly 0; that escapes to zero_flag instead of -inf,
/// and products of hundreds of factors neither under- nor overflow.
struct LogWeight {
  double log_value = 0.0;
  bool zero_flag = false;

  void mul_factor(double f) {
    if (f == 0.0) {
      zero_flag = true;
    } else {
      log_value += std::log(f);
    }
  }
  double value() const { return zero_flag ? 0.0 : std::exp(log_value); }
};

/// M_n(beta) = prod_{j<n} prod_{k<=m} [1 + E_j beta_k(Y_j) 1{Y_j in-exactly-k}]:
/// the density dP_beta/dP_0 restricted to the first n steps. Exactly one inner
/// factor per step is active (k = the current arrival index, while k <= m).
LogWeight weight(const Trajectory& traj, const CookieEnvironment& env, std::size_t n);

/// Path functionals behind the derivative displays, evaluated on [0, T):
///   N = d * sum 1{Y_j not-in^m} 1{Z_j = Z_{j+1}}
///   U = sum E_j / (1 + beta E_j) * 1{Y_j not-in^m} 1{Z_j = Z_{j+1}}
///   M = M_T^m(beta)
struct DerivativeWeights {
  double N = 0.0;
  double U = 0.0;
  LogWeight M;
};

/// Identical-cookie (constant beta) derivative weights over the prefix [0, T).
DerivativeWeights derivative_weights(const Trajectory& traj, double beta, int m, std::int64_t T);

struct WeightedSample {
  double f = 0.0;
  LogWeight w;
};

/// Importance-sampling mean E_beta[f] = E_0[f M] from P_0 samples, with plain
/// standard error and effective sample size (sum w)^2 / sum w^2.
struct ReweightedResult {
  double estimate = 0.0;
  double se = 0.0;
  double ess = 0.0;
  std::int64_t n = 0;
};

ReweightedResult reweighted_expectation(std::span<const WeightedSample> samples);

}  // namespace erw
