#include "erw/walker.hpp"

namespace erw {

namespace {

Trajectory record_walk(const CookieEnvironment& env, int d, std::int64_t n, SeedSpec seed,
                       bool constructed) {
  Trajectory traj;
  traj.dim = d;
  traj.positions.reserve(static_cast<std::size_t>((n + 1) * d));
  traj.horiz_increments.reserve(static_cast<std::size_t>(n));
  traj.move_flags.reserve(static_cast<std::size_t>(n));
  traj.visit_index.reserve(static_cast<std::size_t>(n + 1));
  traj.cookie_used.reserve(static_cast<std::size_t>(n));

  RandomStream rng(seed);
  WalkState state(d);
  auto on_step = [&](const StepEvent& ev) {
    traj.positions.insert(traj.positions.end(), ev.site, ev.site + d);
    traj.visit_index.push_back(ev.visit_k);
    traj.horiz_increments.push_back(static_cast<std::int8_t>(ev.e));
    traj.move_flags.push_back(ev.horizontal ? 1 : 0);
    traj.cookie_used.push_back(ev.beta_used);
  };
  if (constructed)
    walk_constructed(env, d, n, rng, state, on_step);
  else
    walk_direct(env, d, n, rng, state, on_step);

  traj.positions.insert(traj.positions.end(), state.pos(), state.pos() + d);
  traj.visit_index.push_back(state.visit_count());
  return traj;
}

}  // namespace

Trajectory simulate_direct(const CookieEnvironment& env, int d, std::int64_t n, SeedSpec seed) {
  return record_walk(env, d, n, seed, false);
}

Trajectory simulate_constructed(const CookieEnvironment& env, int d, std::int64_t n,
                                SeedSpec seed) {
  return record_walk(env, d, n, seed, true);
}

std::int32_t visit_count_semantics(const Trajectory& traj, std::size_t j) {
  if (j >= traj.visit_index.size()) throw std::out_of_range("visit_count_semantics: bad time");
  std::int32_t prior = 0;
  const std::int32_t* y = traj.site(j);
  for (std::size_t i = 0; i < j; ++i) {
    const std::int32_t* s = traj.site(i);
    bool same = true;
    for (int c = 0; c < traj.dim; ++c) {
      if (s[c] != y[c]) {
        same = false;
        break;
      }
    }
    if (same) ++prior;
  }
  return prior + 1;
}

}  // namespace erw
