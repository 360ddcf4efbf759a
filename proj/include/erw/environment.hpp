#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "erw/lattice.hpp"
#include "erw/rng.hpp"

namespace erw {

/// Symbolic m = +infinity: visit indices never exhaust the cookie stack.
inline constexpr int kInfiniteCookies = std::numeric_limits<int>::max();

/// Marginal cookie law: finite atoms or a uniform interval, support in [-1,1].
class MarginalLaw {
 public:
  static MarginalLaw atoms(std::vector<std::pair<double, double>> value_weight);
  static MarginalLaw uniform(double lo, double hi);
  static MarginalLaw constant(double v) { return atoms({{v, 1.0}}); }

  /// Inverse CDF. Pure; u in [0,1).
  double quantile(double u) const;

  double mean() const;
  double max_abs() const;
  bool is_uniform() const { return uniform_; }
  /// Atom case: (value, probability mass) pairs. Uniform case: empty.
  std::vector<std::pair<double, double>> atom_list() const;
  double support_lo() const { return uniform_ ? lo_ : values_.front(); }
  double support_hi() const { return uniform_ ? hi_ : values_.back(); }

  std::string text() const;                       // canonical form, parse round-trips
  static MarginalLaw parse(const std::string&);   // "atoms(v@w,...)" | "uniform(lo,hi)"

  /// True when quantile(u) <= other.quantile(u) for every u (monotone coupling
  /// through a shared site uniform is then pointwise ordered).
  bool quantile_dominated_by(const MarginalLaw& other) const;

  friend bool operator==(const MarginalLaw&, const MarginalLaw&) = default;

 private:
  MarginalLaw() = default;
  bool uniform_ = false;
  double lo_ = 0.0, hi_ = 0.0;                 // uniform case
  std::vector<double> values_;                 // atom case
  std::vector<double> cum_;                    // cumulative weights, last == 1
};

enum class EnvKind { Deterministic, IIDLazy, VerticalStationary, CoupledPair };

/// Immutable cookie environment beta = {(beta_1..beta_m)(y)}. Lookups are pure
/// functions of (spec, site, visit index): repeated queries agree in any order,
/// so lazy variants reproduce one quenched field without storing it.
class CookieEnvironment {
 public:
  /// Identical cookies (IDEN): one value at every site and every k <= m.
  static CookieEnvironment deterministic(double beta, int m);
  /// Explicit per-cookie stack used at every site; m = stack length.
  static CookieEnvironment deterministic_stack(std::vector<double> stack);
  static CookieEnvironment iid(std::uint64_t env_seed, MarginalLaw law, int m, bool iden);
  static CookieEnvironment vertical_stationary(std::uint64_t env_seed, MarginalLaw law, int m,
                                               bool iden);
  /// Coupled pair beta_1 <= beta_2 sharing one site uniform; beta_t = (1-t)b1 + t b2.
  static CookieEnvironment coupled(const CookieEnvironment& lower, const CookieEnvironment& upper,
                                   double t);

  /// beta_k(y): the bias consumed on the k-th arrival. Returns 0 for k > m.
  double beta(const std::int32_t* coords, int dim, int k) const;
  double beta(const LatticePoint& y, int k) const { return beta(y.c.data(), y.dim, k); }

  /// For CoupledPair: the (lower, upper) values behind beta_t at (y, k).
  std::pair<double, double> beta_pair(const std::int32_t* coords, int dim, int k) const;

  EnvKind kind() const { return kind_; }
  int m() const { return m_; }
  bool infinite_m() const { return m_ == kInfiniteCookies; }
  double t() const { return t_; }
  /// Largest |beta| any lookup can return.
  double sigma_bound() const;
  std::uint64_t env_seed() const { return env_seed_; }
  const CookieEnvironment& lower() const { return *lower_; }
  const CookieEnvironment& upper() const { return *upper_; }

  /// Same spec, different quenched draw (annealed resampling per replicate).
  CookieEnvironment with_seed(std::uint64_t env_seed) const;
  /// CoupledPair at a different interpolation parameter.
  CookieEnvironment at_t(double t) const;

  std::string text() const;
  static CookieEnvironment parse(const std::string&);

 private:
  CookieEnvironment() = default;

  EnvKind kind_ = EnvKind::Deterministic;
  int m_ = 1;
  bool iden_ = true;
  std::uint64_t env_seed_ = 0;
  std::vector<double> stack_;                        // deterministic
  std::optional<MarginalLaw> law_;                   // lazy variants
  std::shared_ptr<const CookieEnvironment> lower_;   // coupled
  std::shared_ptr<const CookieEnvironment> upper_;
  double t_ = 0.0;
};

/// interpolate(pair, t): the coupled environment evaluated at t in [0,1].
CookieEnvironment interpolate(const CookieEnvironment& pair, double t);

// --- e1-permutation of finite environment samples ------------------------------

/// Finite window of an environment realization: site -> cookie stack.
using EnvSample = std::map<LatticePoint, std::vector<double>>;

/// Materializes env over the given sites (stack rows of length min(m, max_k)).
EnvSample materialize(const CookieEnvironment& env, const std::vector<LatticePoint>& sites,
                      int max_k);

/// Per-vertical-line bijections x -> delta_z(x), supplied on a finite domain.
using LinePermutation = std::map<std::vector<std::int32_t>, std::map<std::int32_t, std::int32_t>>;

/// Output at (x,z) equals input at (delta_z(x), z). Throws if a line map is not
/// injective on its domain or maps outside the sample.
EnvSample e1_permute(const EnvSample& sample, const LinePermutation& perm);

}  // namespace erw
