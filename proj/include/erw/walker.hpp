#pragma once

#include <cstdint>

#include "erw/environment.hpp"
#include "erw/rng.hpp"
#include "erw/site_map.hpp"
#include "erw/trajectory.hpp"

namespace erw {

/// Per-step record handed to walk observers before the step is taken.
struct StepEvent {
  std::int64_t time;            // j
  const std::int32_t* site;     // Y_j
  std::int32_t visit_k;         // k_j: this is the k-th arrival at Y_j
  int e;                        // E_j in {-1,0,+1}
  bool horizontal;              // eta_j
  double beta_used;             // cookie consumed at step j (0 if none)
};

/// Reusable per-walk scratch state (visit counter + current position).
class WalkState {
 public:
  explicit WalkState(int dim) : dim_(dim), visits_(dim), pos_(dim, 0) {}

  void reset() {
    visits_.clear();
    std::fill(pos_.begin(), pos_.end(), 0);
    visits_[pos_.data()] = 1;
  }

  int dim() const { return dim_; }
  const std::int32_t* pos() const { return pos_.data(); }
  std::int32_t* mutable_pos() { return pos_.data(); }
  std::int32_t visit_count() { return visits_[pos_.data()]; }
  std::int32_t arrive() { return ++visits_[pos_.data()]; }

 private:
  int dim_;
  SiteHashMap<std::int32_t> visits_;
  std::vector<std::int32_t> pos_;
};

/// Simulates n steps of the m-ERWRC under the quenched law by the direct
/// transition rule: P(+-e_i)=1/2d for i>=2; on the k-th arrival with k<=m,
/// P(+-e_1)=(1 +- beta_k(Y_j))/2d; otherwise P(+-e_1)=1/2d.
template <class OnStep>
void walk_direct(const CookieEnvironment& env, int d, std::int64_t n, RandomStream& rng,
                 WalkState& state, OnStep&& on_step) {
  if (d < 2) throw std::invalid_argument("walk_direct: d >= 2 required");
  state.reset();
  std::int32_t k = 1;
  for (std::int64_t j = 0; j < n; ++j) {
    double b = env.beta(state.pos(), d, k);
    // Slots on [0,2d): [0,1+b) -> +e1, [1+b,2) -> -e1, [i,i+1) -> vertical.
    double u = rng.next_double() * (2.0 * d);
    int axis, sign, e = 0;
    if (u < 2.0) {
      axis = 0;
      sign = (u < 1.0 + b) ? +1 : -1;
      e = sign;
    } else {
      int slot = static_cast<int>(u);
      if (slot >= 2 * d) slot = 2 * d - 1;
      axis = slot / 2;
      sign = (slot & 1) ? -1 : +1;
    }
    on_step(StepEvent{j, state.pos(), k, e, axis == 0, axis == 0 ? b : 0.0});
    state.mutable_pos()[axis] += sign;
    k = state.arrive();
  }
}

/// Simulates the same law by the auxiliary construction: move flags
/// eta_j ~ Ber(1/d) select horizontal steps, site coins Ber((1+beta_k)/2) give
/// the excited direction while cookies remain, fair coins afterwards, and the
/// vertical component consumes an independent simple random walk.
template <class OnStep>
void walk_constructed(const CookieEnvironment& env, int d, std::int64_t n, RandomStream& rng,
                      WalkState& state, OnStep&& on_step) {
  if (d < 2) throw std::invalid_argument("walk_constructed: d >= 2 required");
  state.reset();
  const double p_horizontal = 1.0 / d;
  std::int32_t k = 1;
  for (std::int64_t j = 0; j < n; ++j) {
    bool eta = rng.next_bernoulli(p_horizontal);
    int axis, sign, e = 0;
    double b = 0.0;
    if (eta) {
      axis = 0;
      b = env.beta(state.pos(), d, k);
      // k <= m: zeta_k(Y_j) ~ Ber((1+beta)/2); k > m: fair xi_j (beta = 0).
      sign = rng.next_bernoulli(0.5 * (1.0 + b)) ? +1 : -1;
      e = sign;
    } else {
      std::uint32_t move = rng.next_index(static_cast<std::uint32_t>(2 * (d - 1)));
      axis = 1 + static_cast<int>(move >> 1);
      sign = (move & 1) ? -1 : +1;
    }
    on_step(StepEvent{j, state.pos(), k, e, eta, b});
    state.mutable_pos()[axis] += sign;
    k = state.arrive();
  }
}

Trajectory simulate_direct(const CookieEnvironment& env, int d, std::int64_t n, SeedSpec seed);
Trajectory simulate_constructed(const CookieEnvironment& env, int d, std::int64_t n,
                                SeedSpec seed);

/// k such that Y_j was visited exactly k-1 times among times 0..j-1
/// (recomputed by brute-force scan; equals traj.visit_index[j]).
std::int32_t visit_count_semantics(const Trajectory& traj, std::size_t j);

}  // namespace erw
