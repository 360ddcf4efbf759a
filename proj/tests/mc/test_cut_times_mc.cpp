#include <doctest.h>

#include <cmath>
#include <vector>

#include "erw/cut_times.hpp"
#include "erw/stats.hpp"

using namespace erw;

TEST_CASE("palm rejection sampling is stable across seeds (d=6)") {
  const Window w{4000, 4000};
  CutMomentsResult a = palm_T_moments(6, w, 4000, {5001, 0});
  CutMomentsResult b = palm_T_moments(6, w, 4000, {5002, 0});
  CHECK(a.p_cut() > 0.0);
  CHECK(b.p_cut() > 0.0);
  CHECK(within_sigma(a.p_cut(), a.p_cut_se(), b.p_cut(), b.p_cut_se()));
  CHECK(within_sigma(a.palm_T.mean(), a.palm_T.stderr_mean(), b.palm_T.mean(),
                     b.palm_T.stderr_mean()));
}

TEST_CASE("P(0 in D) = ((d-1)/d) P(0 in D~) at d = 6") {
  const Window w{4000, 4000};
  CutMomentsResult lazy = cut_time_moments(LazyWalkSpec::vertical_of(6), w, 6000, {5003, 0});
  CutMomentsResult jump = cut_time_moments(LazyWalkSpec::jump_chain_of(6), w, 6000, {5004, 0});
  double lhs = lazy.p_cut(), lhs_se = lazy.p_cut_se();
  double rhs = (5.0 / 6.0) * jump.p_cut(), rhs_se = (5.0 / 6.0) * jump.p_cut_se();
  CHECK(within_sigma(lhs, lhs_se, rhs, rhs_se));
}

TEST_CASE("acceptance rate is nonincreasing in the window (common random numbers)") {
  const int d = 6;
  CutDetector det(d - 1);
  std::int64_t acc_narrow = 0, acc_wide = 0;
  const std::int64_t reps = 3000;
  for (std::int64_t r = 0; r < reps; ++r) {
    VerticalPath path(d - 1, 3000, 3000);
    RandomStream rng({5005, static_cast<std::uint64_t>(r)});
    generate_two_sided(LazyWalkSpec::vertical_of(d), rng, path);
    if (det.detect_window(path, 750, 750).zero_is_cut) ++acc_narrow;
    if (det.detect_window(path, 3000, 3000).zero_is_cut) ++acc_wide;
  }
  CHECK(acc_narrow >= acc_wide);
}

TEST_CASE("Kac identities at d = 8 (small-scale)") {
  CutMomentsResult res = palm_T_moments(8, {6000, 6000}, 8000, {5006, 0});
  CHECK(within_sigma(res.T_indicator.mean(), res.T_indicator.stderr_mean(), 1.0, 0.0));
  double prod = res.palm_T.mean() * res.p_cut();
  double se = std::sqrt(res.p_cut() * res.p_cut() * res.palm_T.stderr_mean() * res.palm_T.stderr_mean() +
                        res.palm_T.mean() * res.palm_T.mean() * res.p_cut_se() * res.p_cut_se());
  CHECK(std::fabs(prod - 1.0) <= 3.0 * se);
  CHECK(res.palm_truncation_rate() < 0.01);
}

TEST_CASE("segment estimator cross-validates the rejection sampler (d=7)") {
  const int d = 7;
  CutMomentsResult palm = palm_T_moments(d, {5000, 5000}, 8000, {5007, 0});

  SegmentEstimate length = segment_palm_estimate(
      LazyWalkSpec::vertical_of(d), 400000, 3000, 5000, 50, {5008, 0},
      [](const SegmentView& seg) { return static_cast<double>(seg.length()); });
  CHECK(within_sigma(length.value, length.se, palm.palm_T.mean(), palm.palm_T.stderr_mean()));

  SegmentEstimate ones = segment_palm_estimate(
      LazyWalkSpec::vertical_of(d), 200000, 3000, 5000, 50, {5009, 0},
      [](const SegmentView&) { return 1.0; });
  CHECK(ones.value == 1.0);
  CHECK(ones.se == 0.0);

  SegmentEstimate unit_prob = segment_palm_estimate(
      LazyWalkSpec::vertical_of(d), 400000, 3000, 5000, 50, {5010, 0},
      [](const SegmentView& seg) { return seg.length() == 1 ? 1.0 : 0.0; });
  // P^(T = 1) from the rejection sampler
  std::int64_t t1 = 0, accepted = 0;
  CutDetector det(d - 1);
  for (std::int64_t r = 0; r < 6000; ++r) {
    VerticalPath path(d - 1, 3000, 3000);
    RandomStream rng({5011, static_cast<std::uint64_t>(r)});
    generate_two_sided(LazyWalkSpec::vertical_of(d), rng, path);
    CutRecord rec = det.detect(path);
    if (rec.zero_is_cut && !rec.truncated) {
      ++accepted;
      if (rec.T == 1) ++t1;
    }
  }
  double p1 = static_cast<double>(t1) / static_cast<double>(accepted);
  double p1_se = std::sqrt(p1 * (1.0 - p1) / static_cast<double>(accepted));
  CHECK(within_sigma(unit_prob.value, unit_prob.se, p1, p1_se));
}

TEST_CASE("segment estimator signals starvation") {
  CHECK_THROWS_AS(segment_palm_estimate(
                      LazyWalkSpec::vertical_of(6), 2000, 500, 1400, 1000, {5012, 0},
                      [](const SegmentView&) { return 1.0; }),
                  std::runtime_error);
}

TEST_CASE("rejection budget errors out when the window cannot produce cuts") {
  VerticalPath path(1, 50, 50);
  CutDetector det(1);
  CutRecord rec;
  RandomStream rng({5013, 0});
  // dim 1 SRW essentially never has cut points: tiny budget must throw
  CHECK_THROWS_AS(sample_palm({1, 1.0}, rng, path, det, rec, 50), std::runtime_error);
}

TEST_CASE("geometric thinning identity for the lazy walk (dim 5, small-scale)") {
  const int dim = 5;
  const double eps = 0.6;
  const Window w{6000, 6000};
  CutMomentsResult tilde = lazy_walk_T({dim, 1.0}, w, 12000, {5014, 0});
  CutMomentsResult lazy = lazy_walk_T({dim, eps}, w, 12000, {5015, 0});
  double rhs = tilde.uncond_T.mean() / eps;
  double rhs_se = tilde.uncond_T.stderr_mean() / eps;
  CHECK(within_sigma(lazy.uncond_T.mean(), lazy.uncond_T.stderr_mean(), rhs, rhs_se));
}

TEST_CASE("eps = 1 lazy walk has the jump-chain cut law (KS)") {
  const int dim = 5;
  std::vector<double> a, b;
  CutDetector det(dim);
  for (std::int64_t r = 0; r < 4000; ++r) {
    VerticalPath path(dim, 2000, 2000);
    RandomStream rng_a({5016, static_cast<std::uint64_t>(r)});
    generate_two_sided({dim, 1.0}, rng_a, path);
    CutRecord rec = det.detect(path);
    if (!rec.truncated) a.push_back(static_cast<double>(rec.T));
    RandomStream rng_b({5017, static_cast<std::uint64_t>(r)});
    generate_two_sided(LazyWalkSpec::jump_chain_of(dim + 1), rng_b, path);
    rec = det.detect(path);
    if (!rec.truncated) b.push_back(static_cast<double>(rec.T));
  }
  CHECK(ks_two_sample_p(a, b) > 0.01);
}
