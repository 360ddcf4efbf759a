#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "erw/cut_times.hpp"
#include "erw/environment.hpp"
#include "erw/girsanov.hpp"
#include "erw/stats.hpp"

namespace erw {

enum class SpeedMethod { LLN, CutRatio, Girsanov };

const char* speed_method_name(SpeedMethod m);

struct SpeedEstimate {
  SpeedMethod method = SpeedMethod::LLN;
  int d = 0;
  int m = 1;
  double beta_or_t = 0.0;
  double value = 0.0;
  double se = 0.0;
  std::int64_t replicates = 0;
  std::int64_t horizon = 0;   // LLN
  Window window;              // cut-based methods
  double ess = -1.0;          // Girsanov methods only
  double truncation_rate = 0.0;
};

struct RunOpts {
  int threads = 1;
  std::int64_t max_rejection_attempts = 200000;
  double ess_warn_fraction = 0.1;
};

/// X_n/n across replicates; lazy environments are resampled per replicate, so
/// the estimate targets the annealed speed.
SpeedEstimate speed_lln(const CookieEnvironment& env, int d, std::int64_t horizon,
                        std::int64_t replicates, SeedSpec seed, const RunOpts& opts = {});

/// Palm-sampled vertical path, horizontal walk simulated on top under the
/// quenched law (legitimate: {0 in D} is measurable w.r.t. the vertical walk
/// alone and the horizontal coins are independent of it), then sum X_T / sum T
/// with delta-method error and a grouped-jackknife cross-check.
struct CutRatioResult {
  SpeedEstimate est;
  double se_jackknife = 0.0;
  double acceptance_rate = 0.0;
  std::int64_t attempts = 0;
};
CutRatioResult speed_cut_ratio(const CookieEnvironment& env, int d, Window window,
                               std::int64_t replicates, SeedSpec seed, const RunOpts& opts = {});

// --- one batch of P_0 trajectories with cut records --------------------------------

/// Per-replicate functionals of a symmetric-walk sample: the cut time, the
/// horizontal displacement at T, counts of fresh-up-to-m horizontal steps by
/// sign (enough to rebuild M_T^m(beta), N_T^m and U_T^m(beta) for any beta of
/// an identical-cookie environment), and the range R_T.
struct P0Sample {
  std::int32_t T = -1;
  std::uint8_t zero_cut = 0;
  std::uint8_t truncated = 0;
  std::int32_t x_T = 0;
  std::int32_t n_plus = 0;
  std::int32_t n_minus = 0;
  std::int32_t range_T = 0;
};

struct P0Batch {
  int d = 0;
  int m = 1;
  Window window;
  std::int64_t replicates = 0;
  std::vector<P0Sample> samples;
  std::int64_t n_zero_cut = 0;
  std::int64_t n_zero_trunc = 0;

  double truncation_rate() const {
    return n_zero_cut > 0 ? static_cast<double>(n_zero_trunc) / static_cast<double>(n_zero_cut)
                          : 0.0;
  }
};

P0Batch run_p0_batch(int d, int m, Window window, std::int64_t replicates, SeedSpec seed,
                     const RunOpts& opts = {});

// --- Girsanov-reweighted estimators over one shared batch ---------------------------

struct SweepPoint {
  double beta = 0.0;
  Estimate v_xt;       // E_0[X_T M 1_D] / E_0[T 1_D]
  Estimate v_numv;     // E_0[beta (N_T^m/d) M 1_D] / E_0[T 1_D]
  double ess = 0.0;
  bool ess_low = false;
};

struct SweepResult {
  int d = 0;
  int m = 1;
  Window window;
  std::int64_t replicates = 0;
  Estimate denom;      // E_0[T 1_D], computed once and shared across the grid
  double truncation_rate = 0.0;
  std::vector<SweepPoint> points;
};

SweepResult speed_girsanov_sweep(int d, int m, const std::vector<double>& beta_grid, Window window,
                                 std::int64_t replicates, SeedSpec seed, const RunOpts& opts = {});
SweepResult sweep_from_batch(const P0Batch& batch, const std::vector<double>& beta_grid,
                             const RunOpts& opts = {});

/// lim v(beta)/beta = R(0)/d, estimated as E_0[N_T 1_D]/d with the m=1 fresh
/// indicator.
struct DerivativeAtZeroResult {
  Estimate value;
  Window window;
  std::int64_t replicates = 0;
  double truncation_rate = 0.0;
};
DerivativeAtZeroResult derivative_at_zero(int d, Window window, std::int64_t replicates,
                                          SeedSpec seed, const RunOpts& opts = {});
DerivativeAtZeroResult derivative_at_zero_from_batch(const P0Batch& batch);

/// R(0): long-run R_n/n for the symmetric walk, plus the Palm-form identity
/// estimator E_0(R_T 1_D) from the same machinery as the cut estimators.
struct RangeConstantResult {
  Estimate lln;        // mean of R_n/n
  Estimate palm;       // E_0(R_T 1_D)
  std::int64_t horizon = 0;
  std::int64_t replicates = 0;
  std::int64_t palm_replicates = 0;
};
RangeConstantResult range_constant(int d, std::int64_t horizon, std::int64_t replicates,
                                   Window window, std::int64_t palm_replicates, SeedSpec seed,
                                   const RunOpts& opts = {});

/// E_0(R_n) and E_0(N_n) at a fixed horizon (they are equal in expectation).
struct RangeVsNResult {
  Estimate r_n;
  Estimate n_n;
};
RangeVsNResult range_vs_n_statistic(int d, std::int64_t horizon, std::int64_t replicates,
                                    SeedSpec seed, const RunOpts& opts = {});

/// dv/dbeta(m, beta) via the two-term display: (1/d) E_0[N M 1_D]/E_0[T 1_D]
/// + (beta/d) E_0[N M U 1_D]/E_0[T 1_D].
struct MDerivativeResult {
  Estimate total;
  Estimate term1;      // first ratio (before the 1/d factor is applied? no: reported as contributions)
  Estimate term2;
  double ess = 0.0;
  bool ess_low = false;
  double truncation_rate = 0.0;
  std::int64_t replicates = 0;
};
MDerivativeResult derivative_v_m_beta(int d, int m, double beta, Window window,
                                      std::int64_t replicates, SeedSpec seed,
                                      const RunOpts& opts = {});
MDerivativeResult m_derivative_from_batch(const P0Batch& batch, double beta,
                                          const RunOpts& opts = {});

/// df/dt(t) for a coupled environment pair: outer draws from Q, inner
/// P_0-reweighting per environment; cluster (per-environment) errors and a
/// between/within variance split. Also reports the i<j restriction of the
/// second term and its i>=j complement (expected 0 within noise).
struct CoupledDerivativeResult {
  Estimate total;
  Estimate term1;
  Estimate term2;
  Estimate term2_lt;
  Estimate term2_ge;
  Estimate denom;
  double between_variance = 0.0;
  double within_variance = 0.0;
  double ess_min = 0.0;
  bool ess_low = false;
  double truncation_rate = 0.0;
  std::int64_t env_draws = 0;
  std::int64_t replicates_per_env = 0;
};
CoupledDerivativeResult coupled_derivative(const CookieEnvironment& pair, double t, int d,
                                           Window window, std::int64_t env_draws,
                                           std::int64_t replicates_per_env, SeedSpec seed,
                                           const RunOpts& opts = {});

}  // namespace erw
