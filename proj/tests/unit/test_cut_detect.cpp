#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "erw/cut_times.hpp"
#include "erw/rng.hpp"

using namespace erw;

namespace {

// O(L^2) reference: pairwise set disjointness per candidate time.
std::vector<std::int64_t> brute_force_cuts(const VerticalPath& path) {
  std::vector<std::int64_t> cuts;
  for (std::int64_t t = -path.w_past() + 1; t <= path.w_future(); ++t) {
    std::set<std::vector<std::int32_t>> past, future;
    for (std::int64_t n = -path.w_past(); n < t; ++n)
      past.insert(std::vector<std::int32_t>(path.at(n), path.at(n) + path.dim()));
    bool disjoint = true;
    for (std::int64_t n = t; n <= path.w_future() && disjoint; ++n)
      if (past.count(std::vector<std::int32_t>(path.at(n), path.at(n) + path.dim()))) disjoint = false;
    if (disjoint) cuts.push_back(t);
  }
  return cuts;
}

}  // namespace

TEST_CASE("self-avoiding path: every index is a window cut time") {
  VerticalPath path(1, 5, 5);
  for (std::int64_t n = -5; n <= 5; ++n) path.row(n)[0] = static_cast<std::int32_t>(n);
  CutDetector det(1);
  CutRecord rec = det.detect(path, true);
  CHECK(rec.zero_is_cut);
  CHECK(rec.T == 1);
  REQUIRE(rec.window_cut_times.size() == 10);  // t in (-5, 5]
  for (std::size_t i = 0; i < rec.window_cut_times.size(); ++i)
    CHECK(rec.window_cut_times[i] == static_cast<std::int64_t>(i) - 4);
}

TEST_CASE("overlapping past and future block the cut") {
  // Z_{-1} = e, Z_0 = 0, Z_1 = e: neither 0 nor 1 is a window cut time
  VerticalPath path(2, 1, 1);
  path.row(-1)[0] = 1;
  path.row(-1)[1] = 0;
  path.row(0)[0] = 0;
  path.row(0)[1] = 0;
  path.row(1)[0] = 1;
  path.row(1)[1] = 0;
  CutDetector det(2);
  CutRecord rec = det.detect(path, true);
  CHECK_FALSE(rec.zero_is_cut);
  CHECK(rec.truncated);
  CHECK(rec.window_cut_times.empty());
}

TEST_CASE("fast detection equals the quadratic oracle on random paths") {
  CutDetector det1(1), det3(3);
  for (int trial = 0; trial < 1000; ++trial) {
    int dim = trial % 2 == 0 ? 1 : 3;
    LazyWalkSpec spec{dim, trial % 3 == 0 ? 1.0 : 0.75};
    VerticalPath path(dim, 40, 60);
    RandomStream rng({500 + static_cast<std::uint64_t>(trial), 0});
    generate_two_sided(spec, rng, path);
    CutRecord rec = (dim == 1 ? det1 : det3).detect(path, true);
    std::vector<std::int64_t> brute = brute_force_cuts(path);
    REQUIRE(rec.window_cut_times == brute);
    bool zero_in = std::binary_search(brute.begin(), brute.end(), 0);
    CHECK(rec.zero_is_cut == zero_in);
    auto first_pos = std::find_if(brute.begin(), brute.end(), [](std::int64_t t) { return t > 0; });
    if (first_pos == brute.end()) {
      CHECK(rec.truncated);
    } else {
      REQUIRE_FALSE(rec.truncated);
      CHECK(rec.T == *first_pos);
    }
  }
}

TEST_CASE("shrinking the window can only add cut times") {
  CutDetector det(2);
  for (int trial = 0; trial < 200; ++trial) {
    VerticalPath path(2, 80, 80);
    RandomStream rng({900 + static_cast<std::uint64_t>(trial), 0});
    generate_two_sided({2, 0.8}, rng, path);
    CutRecord wide = det.detect_window(path, 80, 80, true);
    CutRecord narrow = det.detect_window(path, 40, 40, true);
    std::set<std::int64_t> narrow_set(narrow.window_cut_times.begin(),
                                      narrow.window_cut_times.end());
    for (std::int64_t t : wide.window_cut_times) {
      if (t > -40 && t <= 40) CHECK(narrow_set.count(t) == 1);
    }
    if (wide.zero_is_cut) CHECK(narrow.zero_is_cut);
  }
}

TEST_CASE("a cut at 0 means the last pre-zero step moved and the jump chain cuts at 0") {
  // {0 in D} = {eta_{-1} = 0, 0 in D~} through the jump-chain embedding
  const int dim = 4;
  CutDetector det(dim);
  for (int trial = 0; trial < 200; ++trial) {
    VerticalPath path(dim, 120, 120);
    RandomStream rng({1300 + static_cast<std::uint64_t>(trial), 0});
    generate_two_sided(LazyWalkSpec{dim, 0.8}, rng, path);

    std::int64_t past_moves = 0, future_moves = 0;
    for (std::int64_t n = -path.w_past(); n < 0; ++n)
      if (!path.hold(n)) ++past_moves;
    for (std::int64_t n = 0; n < path.w_future(); ++n)
      if (!path.hold(n)) ++future_moves;
    VerticalPath jump(dim, past_moves, future_moves);
    std::int64_t idx = 0;
    for (std::int64_t n = 0; n <= path.w_future(); ++n) {
      if (n > 0 && path.hold(n - 1)) continue;
      std::copy(path.at(n), path.at(n) + dim, jump.row(idx));
      ++idx;
    }
    idx = -1;
    for (std::int64_t n = -1; n >= -path.w_past(); --n) {
      if (path.hold(n)) continue;
      std::copy(path.at(n), path.at(n) + dim, jump.row(idx));
      --idx;
    }

    CutRecord full = det.detect(path);
    CutRecord tilde = det.detect(jump);
    bool moved_into_zero = !path.hold(-1);
    CHECK(full.zero_is_cut == (moved_into_zero && tilde.zero_is_cut));
  }
}
