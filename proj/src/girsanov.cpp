#include "erw/girsanov.hpp"

#include <limits>
#include <stdexcept>

namespace erw {

LogWeight weight(const Trajectory& traj, const CookieEnvironment& env, std::size_t n) {
  if (n > traj.length()) throw std::invalid_argument("weight: n exceeds trajectory length");
  LogWeight w;
  for (std::size_t j = 0; j < n; ++j) {
    int e = traj.horiz_increments[j];
    if (e == 0) continue;  // vertical step: every factor is 1
    std::int32_t k = traj.visit_index[j];
    if (k > env.m()) continue;
    double b = env.beta(traj.site(j), traj.dim, k);
    w.mul_factor(1.0 + e * b);
  }
  return w;
}

DerivativeWeights derivative_weights(const Trajectory& traj, double beta, int m, std::int64_t T) {
  if (T < 0 || static_cast<std::size_t>(T) > traj.length())
    throw std::invalid_argument("derivative_weights: T out of range (or truncated)");
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("derivative_weights: beta in [0,1) required");
  DerivativeWeights dw;
  for (std::int64_t j = 0; j < T; ++j) {
    std::size_t sj = static_cast<std::size_t>(j);
    if (!traj.move_flags[sj]) continue;  // Z_j != Z_{j+1}
    std::int32_t k = traj.visit_index[sj];
    if (!visited_fewer_than(k, m)) continue;
    int e = traj.horiz_increments[sj];
    dw.N += 1.0;
    dw.U += e / (1.0 + beta * e);
    dw.M.mul_factor(1.0 + e * beta);
  }
  dw.N *= traj.dim;
  return dw;
}

ReweightedResult reweighted_expectation(std::span<const WeightedSample> samples) {
  if (samples.size() < 2) throw std::invalid_argument("reweighted_expectation: need >= 2 samples");
  ReweightedResult res;
  res.n = static_cast<std::int64_t>(samples.size());

  long double sum = 0.0L, sumsq = 0.0L;
  double max_lw = -std::numeric_limits<double>::infinity();
  bool any_nonzero = false;
  for (const WeightedSample& s : samples) {
    if (!s.w.zero_flag) {
      any_nonzero = true;
      max_lw = std::max(max_lw, s.w.log_value);
    }
  }
  if (!any_nonzero) throw std::invalid_argument("reweighted_expectation: all weights zero");

  long double wsum = 0.0L, w2sum = 0.0L;  // shifted by max_lw: ESS is scale-free
  for (const WeightedSample& s : samples) {
    double w = s.w.value();
    long double g = static_cast<long double>(s.f) * w;
    sum += g;
    sumsq += g * g;
    if (!s.w.zero_flag) {
      long double ws = std::exp(static_cast<long double>(s.w.log_value) - max_lw);
      wsum += ws;
      w2sum += ws * ws;
    }
  }
  long double n = static_cast<long double>(res.n);
  long double mean = sum / n;
  res.estimate = static_cast<double>(mean);
  if (res.n > 1) {
    long double var = (sumsq - n * mean * mean) / (n - 1.0L);
    if (var < 0.0L) var = 0.0L;
    res.se = static_cast<double>(std::sqrt(var / n));
  }
  res.ess = static_cast<double>(wsum * wsum / w2sum);
  return res;
}

}  // namespace erw
