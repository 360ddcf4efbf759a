#include <doctest.h>

#include <cmath>
#include <iostream>
#include <vector>

#include "erw/girsanov.hpp"
#include "erw/oracle.hpp"
#include "erw/stats.hpp"
#include "erw/walker.hpp"

using namespace erw;

namespace {

std::vector<WeightedSample> p0_samples(int d, std::int64_t n, std::int64_t reps,
                                       const CookieEnvironment& env, std::uint64_t master,
                                       const std::function<double(const Trajectory&)>& f) {
  CookieEnvironment p0 = CookieEnvironment::deterministic(0.0, 1);
  std::vector<WeightedSample> out;
  out.reserve(static_cast<std::size_t>(reps));
  for (std::int64_t r = 0; r < reps; ++r) {
    Trajectory traj = simulate_direct(p0, d, n, {master, static_cast<std::uint64_t>(r)});
    out.push_back({f(traj), weight(traj, env, traj.length())});
  }
  return out;
}

}  // namespace

TEST_CASE("Monte Carlo density normalization at n = 50") {
  CookieEnvironment env = CookieEnvironment::deterministic(0.5, 1);
  auto samples = p0_samples(2, 50, 40000, env, 6001, [](const Trajectory&) { return 1.0; });
  ReweightedResult res = reweighted_expectation(samples);
  CHECK(within_sigma(res.estimate, res.se, 1.0, 0.0));
}

TEST_CASE("reweighted X_3 hits the quenched oracle value") {
  CookieEnvironment env = CookieEnvironment::deterministic(0.5, 1);
  auto quenched = oracle::enumerate_paths(2, 3, env);
  double target = oracle::oracle_expectation(
      quenched, [](const Trajectory& t) { return static_cast<double>(t.horizontal(t.length())); },
      2);
  auto samples = p0_samples(2, 3, 60000, env, 6002, [](const Trajectory& t) {
    return static_cast<double>(t.horizontal(t.length()));
  });
  ReweightedResult res = reweighted_expectation(samples);
  CHECK(within_sigma(res.estimate, res.se, target, 0.0));
}

TEST_CASE("ESS trend in beta (diagnostic, reported only)") {
  CookieEnvironment p0 = CookieEnvironment::deterministic(0.0, 1);
  std::vector<double> esses;
  for (double beta : {0.2, 0.5, 0.8}) {
    CookieEnvironment env = CookieEnvironment::deterministic(beta, 1);
    auto samples = p0_samples(2, 40, 4000, env, 6003, [](const Trajectory&) { return 1.0; });
    esses.push_back(reweighted_expectation(samples).ess);
  }
  std::cout << "[info] ESS at beta 0.2/0.5/0.8: " << esses[0] << " " << esses[1] << " "
            << esses[2] << "\n";
  CHECK(esses[0] > 0.0);
}
