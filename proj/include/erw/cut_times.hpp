#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "erw/rng.hpp"
#include "erw/site_map.hpp"
#include "erw/stats.hpp"

namespace erw {

/// Lazy walk on Z^dim: holds with probability 1-eps, otherwise one uniform
/// unit move (each of the 2*dim directions with probability eps/(2*dim)).
/// The vertical component of the d-dimensional model is dim = d-1 with
/// eps = (d-1)/d; eps = 1 gives the jump chain (a plain SRW).
struct LazyWalkSpec {
  int dim = 1;
  double eps = 1.0;

  static LazyWalkSpec vertical_of(int d) {
    return {d - 1, static_cast<double>(d - 1) / static_cast<double>(d)};
  }
  static LazyWalkSpec jump_chain_of(int d) { return {d - 1, 1.0}; }
};

/// Two-sided path Z_n for n in [-w_past, w_future], Z_0 = 0. Generated as two
/// independent one-sided walks glued at 0 (increments are i.i.d., so this is
/// exact). w_past = 0 gives a one-sided run.
class VerticalPath {
 public:
  VerticalPath(int dim, std::int64_t w_past, std::int64_t w_future)
      : dim_(dim), w_past_(w_past), w_future_(w_future),
        coords_(static_cast<std::size_t>((w_past + w_future + 1) * dim), 0) {}

  int dim() const { return dim_; }
  std::int64_t w_past() const { return w_past_; }
  std::int64_t w_future() const { return w_future_; }

  const std::int32_t* at(std::int64_t n) const {
    return &coords_[static_cast<std::size_t>((n + w_past_) * dim_)];
  }
  std::int32_t* row(std::int64_t n) {
    return &coords_[static_cast<std::size_t>((n + w_past_) * dim_)];
  }

  /// Z_j == Z_{j+1} (step j is a hold; in the full walk, a horizontal step).
  bool hold(std::int64_t j) const {
    const std::int32_t* a = at(j);
    const std::int32_t* b = at(j + 1);
    for (int i = 0; i < dim_; ++i)
      if (a[i] != b[i]) return false;
    return true;
  }

 private:
  int dim_;
  std::int64_t w_past_, w_future_;
  std::vector<std::int32_t> coords_;
};

void generate_two_sided(const LazyWalkSpec& spec, RandomStream& rng, VerticalPath& path);

/// Window cut times of a finite path: t with Z_[-w_past,t) and Z_[t,w_future]
/// visiting disjoint site sets. Window cuts are a superset of the true cuts
/// restricted to the window (the finite test can only add false positives).
struct CutRecord {
  std::int64_t w_past = 0, w_future = 0;
  bool zero_is_cut = false;
  std::int64_t T = -1;      // first positive window cut time; valid iff !truncated
  bool truncated = true;    // no positive window cut found
  std::vector<std::int64_t> window_cut_times;  // filled only when collected
};

/// Reusable scratch for cut detection. detect() runs in O(L) via per-site
/// first/last-visit indices and an interval-coverage sweep.
class CutDetector {
 public:
  explicit CutDetector(int dim) : sites_(dim) {}

  CutRecord detect(const VerticalPath& path, bool collect_all = false) {
    return detect_window(path, path.w_past(), path.w_future(), collect_all);
  }
  /// Detection restricted to the sub-window [-w_past, w_future] of the path.
  CutRecord detect_window(const VerticalPath& path, std::int64_t w_past, std::int64_t w_future,
                          bool collect_all = false);

 private:
  struct FirstLast {
    std::int32_t first = -1, last = -1;
  };
  SiteHashMap<FirstLast> sites_;
  std::vector<std::int32_t> coverage_;
};

struct Window {
  std::int64_t past = 10000;
  std::int64_t future = 10000;
};

/// Monte Carlo moments of the first positive cut time T, both under the Palm
/// conditioning {0 in D} and unconditioned, from independent two-sided paths.
struct CutMomentsResult {
  LazyWalkSpec spec;
  Window window;
  std::int64_t replicates = 0;

  MeanVar palm_T, palm_T2, palm_T3;  // conditioned on {0 in D}, truncation excluded
  MeanVar uncond_T, uncond_T2;       // all paths, truncation excluded
  MeanVar T_indicator;               // T * 1{0 in D} over every path (0 off the event)
  CrossMoments<3> palm_powers;       // joint (T, T^2, T^3) on the Palm event
  CrossMoments<2> uncond_powers;     // joint (T, T^2) over all non-truncated paths

  std::int64_t n_zero_cut = 0;
  std::int64_t n_zero_cut_truncated = 0;
  std::int64_t n_truncated = 0;

  double p_cut() const {
    return replicates > 0 ? static_cast<double>(n_zero_cut) / static_cast<double>(replicates) : 0.0;
  }
  double p_cut_se() const {
    if (replicates < 2) return 0.0;
    double p = p_cut();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(replicates));
  }
  /// Truncation among Palm-accepted paths.
  double palm_truncation_rate() const {
    return n_zero_cut > 0 ? static_cast<double>(n_zero_cut_truncated) / static_cast<double>(n_zero_cut)
                          : 0.0;
  }
  double truncation_rate() const {
    return replicates > 0 ? static_cast<double>(n_truncated) / static_cast<double>(replicates) : 0.0;
  }
};

CutMomentsResult cut_time_moments(const LazyWalkSpec& spec, Window window, std::int64_t replicates,
                                  SeedSpec seed, int threads = 1);

/// palm_T_moments of the model's vertical walk: spec = vertical_of(d).
inline CutMomentsResult palm_T_moments(int d, Window window, std::int64_t replicates, SeedSpec seed,
                                       int threads = 1) {
  return cut_time_moments(LazyWalkSpec::vertical_of(d), window, replicates, seed, threads);
}

/// Moments of T^eps for the eps-lazy walk (unconditioned ones feed the
/// geometric-thinning identities).
inline CutMomentsResult lazy_walk_T(const LazyWalkSpec& spec, Window window,
                                    std::int64_t replicates, SeedSpec seed, int threads = 1) {
  return cut_time_moments(spec, window, replicates, seed, threads);
}

/// Rejection sampler for the Palm measure P(.|0 in D): regenerates two-sided
/// paths on the caller's stream until 0 is an untruncated window cut time.
/// Returns the number of attempts; throws if max_attempts is exhausted.
std::int64_t sample_palm(const LazyWalkSpec& spec, RandomStream& rng, VerticalPath& path,
                         CutDetector& detector, CutRecord& rec, std::int64_t max_attempts);

/// One long one-sided run: consecutive cut segments [T_i, T_{i+1}) feed the
/// Palm expectation of a per-segment functional. Cross-validates the rejection
/// sampler. Standard error via batch means over the segment sequence.
struct SegmentView {
  const VerticalPath* path;
  std::int64_t begin, end;  // segment [begin, end)
  std::int64_t length() const { return end - begin; }
};

struct SegmentEstimate {
  double value = 0.0;
  double se = 0.0;
  std::int64_t segments = 0;
};

SegmentEstimate segment_palm_estimate(const LazyWalkSpec& spec, std::int64_t run_length,
                                      std::int64_t burn_in, std::int64_t tail_guard,
                                      std::int64_t min_segments, SeedSpec seed,
                                      const std::function<double(const SegmentView&)>& f);

/// Exact P(Z^eps_n = 0) for the lazy walk on Z^dim.
enum class ReturnProbMethod {
  Convolution,  // n-fold kernel convolution over the box [-n, n]^dim
  Quadrature,   // tensorized 64-node Gauss-Legendre on the characteristic
                // integral, evaluated through its per-axis moment expansion
};

double return_probability(int dim, double eps, int n, ReturnProbMethod method);

}  // namespace erw
