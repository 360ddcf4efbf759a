#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "erw/environment.hpp"
#include "erw/trajectory.hpp"

namespace erw {
namespace oracle {

/// Direction code: axis*2 + (sign < 0), matching all_directions() order.
using PathCode = std::vector<std::uint8_t>;

struct PathAtom {
  PathCode path;
  double probability = 0.0;
};

/// Replays a coded path from the origin into a full Trajectory (positions,
/// E_j, eta_j, visit indices; cookie_used filled from env when given).
Trajectory replay(int d, const PathCode& code, const CookieEnvironment* env = nullptr);

/// Every length-n path with its exact quenched probability under env, via the
/// product formula (1/2d)^n prod_j [1 + E_j beta_{k_j}(Y_j) 1{k_j <= m}].
/// Lexicographic path order. Guard: (2d)^n <= 10^7.
std::vector<PathAtom> enumerate_paths(int d, int n, const CookieEnvironment& env);

/// Annealed law for a finite mixture of environments (atoms of Q with weights).
std::vector<PathAtom> enumerate_annealed(int d, int n,
                                         const std::vector<std::pair<CookieEnvironment, double>>& mixture);

/// Annealed law for an i.i.d. identical-cookie environment with marginal law mu:
/// per-path probability factorizes over sites as E_mu[prod of site factors]
/// (atoms summed exactly; uniform laws integrated by Gauss-Legendre, exact for
/// these polynomial integrands).
std::vector<PathAtom> enumerate_annealed_iid(int d, int n, const MarginalLaw& law, int m);

/// Pushforward of the auxiliary construction: enumerates the move flags, site
/// coins, fair coins and vertical jumps, and accumulates the resulting path
/// probabilities. Tiny instances only ((2d)^n <= 10^5 paths reachable).
std::vector<PathAtom> enumerate_constructed(int d, int n, const CookieEnvironment& env);

double oracle_expectation(const std::vector<PathAtom>& atoms,
                          const std::function<double(const Trajectory&)>& f, int d,
                          const CookieEnvironment* env = nullptr);

/// Total-variation distance between two path laws over the same instance.
double total_variation(const std::vector<PathAtom>& a, const std::vector<PathAtom>& b);

// --- exact-rational mode (n <= 6) --------------------------------------------------

/// Minimal exact rational on gcd-reduced 128-bit integers; throws on overflow.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  Rational() = default;
  Rational(long long n, long long d);
  static Rational of(long long n, long long d = 1) { return Rational(n, d); }

  Rational operator+(const Rational&) const;
  Rational operator-(const Rational&) const;
  Rational operator*(const Rational&) const;
  bool operator==(const Rational&) const;
  double to_double() const;

 private:
  void reduce();
};

struct RationalAtom {
  PathCode path;
  Rational probability;
};

/// Exact path law for an identical-cookie deterministic environment with
/// rational bias beta = beta_num/beta_den.
std::vector<RationalAtom> enumerate_rational(int d, int n, long long beta_num, long long beta_den,
                                             int m);

Rational oracle_expectation_rational(const std::vector<RationalAtom>& atoms,
                                     const std::function<Rational(const Trajectory&)>& f, int d);

}  // namespace oracle
}  // namespace erw
