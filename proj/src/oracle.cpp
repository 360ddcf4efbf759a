#include "erw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "erw/site_map.hpp"
#include "erw/stats.hpp"

namespace erw {
namespace oracle {

namespace {

double pow_int(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void check_instance(int d, int n, double limit) {
  if (d < 2) throw std::invalid_argument("oracle: d >= 2 required");
  if (n < 0) throw std::invalid_argument("oracle: n >= 0 required");
  if (pow_int(2.0 * d, n) > limit) throw std::invalid_argument("oracle: instance too large");
}

struct Dfs {
  int d, n;
  std::vector<std::int32_t> pos;
  SiteHashMap<std::int32_t> counts;
  PathCode code;

  Dfs(int d_, int n_) : d(d_), n(n_), pos(static_cast<std::size_t>(d_), 0), counts(d_) {
    counts[pos.data()] = 1;
    code.reserve(static_cast<std::size_t>(n_));
  }

  std::int32_t visit_k() { return counts[pos.data()]; }

  void move(std::uint8_t dir_code) {
    pos[dir_code >> 1] += (dir_code & 1) ? -1 : +1;
    ++counts[pos.data()];
    code.push_back(dir_code);
  }
  void unmove() {
    std::uint8_t dir_code = code.back();
    code.pop_back();
    --counts[pos.data()];
    pos[dir_code >> 1] -= (dir_code & 1) ? -1 : +1;
  }
};

}  // namespace

Trajectory replay(int d, const PathCode& code, const CookieEnvironment* env) {
  Trajectory traj;
  traj.dim = d;
  std::vector<std::int32_t> pos(static_cast<std::size_t>(d), 0);
  SiteHashMap<std::int32_t> counts(d);
  counts[pos.data()] = 1;
  std::int32_t k = 1;
  for (std::uint8_t c : code) {
    int axis = c >> 1;
    int sign = (c & 1) ? -1 : +1;
    if (axis >= d) throw std::invalid_argument("replay: bad direction code");
    traj.positions.insert(traj.positions.end(), pos.begin(), pos.end());
    traj.visit_index.push_back(k);
    bool horizontal = axis == 0;
    traj.move_flags.push_back(horizontal ? 1 : 0);
    traj.horiz_increments.push_back(horizontal ? static_cast<std::int8_t>(sign) : 0);
    double b = 0.0;
    if (horizontal && env != nullptr) b = env->beta(pos.data(), d, k);
    traj.cookie_used.push_back(b);
    pos[static_cast<std::size_t>(axis)] += sign;
    k = ++counts[pos.data()];
  }
  traj.positions.insert(traj.positions.end(), pos.begin(), pos.end());
  traj.visit_index.push_back(k);
  return traj;
}

std::vector<PathAtom> enumerate_paths(int d, int n, const CookieEnvironment& env) {
  check_instance(d, n, 1e7);
  std::vector<PathAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(pow_int(2.0 * d, n)));
  Dfs dfs(d, n);
  const double inv2d = 1.0 / (2.0 * d);

  auto rec = [&](auto&& self, int depth, double p) -> void {
    if (depth == n) {
      atoms.push_back({dfs.code, p});
      return;
    }
    std::int32_t k = dfs.visit_k();
    double b = env.beta(dfs.pos.data(), d, k);
    for (int c = 0; c < 2 * d; ++c) {
      double factor = inv2d;
      if (c == 0) factor *= 1.0 + b;
      if (c == 1) factor *= 1.0 - b;
      dfs.move(static_cast<std::uint8_t>(c));
      self(self, depth + 1, p * factor);
      dfs.unmove();
    }
  };
  rec(rec, 0, 1.0);
  return atoms;
}

std::vector<PathAtom> enumerate_annealed(
    int d, int n, const std::vector<std::pair<CookieEnvironment, double>>& mixture) {
  if (mixture.empty()) throw std::invalid_argument("enumerate_annealed: empty mixture");
  double total = 0.0;
  for (const auto& [env, w] : mixture) total += w;
  std::vector<PathAtom> out;
  for (const auto& [env, w] : mixture) {
    std::vector<PathAtom> part = enumerate_paths(d, n, env);
    if (out.empty()) {
      out = std::move(part);
      for (PathAtom& a : out) a.probability *= w / total;
    } else {
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i].probability += part[i].probability * w / total;
    }
  }
  return out;
}

std::vector<PathAtom> enumerate_annealed_iid(int d, int n, const MarginalLaw& law, int m) {
  check_instance(d, n, 1e6);
  // Per-path probability: (1/2d)^n prod_sites E_mu[prod of the site's factors
  // (1 + e b)]. Atom laws sum exactly; uniform laws integrate by 32-node
  // Gauss-Legendre, exact for these polynomial integrands (degree <= n).
  std::vector<std::pair<double, double>> quad;  // (value, mass)
  if (law.is_uniform()) {
    std::vector<double> gx, gw;
    gauss_legendre(32, gx, gw);
    double lo = law.support_lo(), hi = law.support_hi();
    for (std::size_t i = 0; i < gx.size(); ++i)
      quad.emplace_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[i], 0.5 * gw[i]);
  } else {
    quad = law.atom_list();
  }

  std::vector<PathAtom> out;
  std::vector<PathAtom> base = enumerate_paths(d, n, CookieEnvironment::deterministic(0.0, 1));
  out.reserve(base.size());
  for (PathAtom& a : base) {
    Trajectory traj = replay(d, a.path);
    std::map<std::vector<std::int32_t>, std::vector<int>> site_uses;
    for (std::size_t j = 0; j < traj.length(); ++j) {
      int e = traj.horiz_increments[j];
      if (e == 0) continue;
      if (!visited_fewer_than(traj.visit_index[j], m)) continue;
      std::vector<std::int32_t> key(traj.site(j), traj.site(j) + d);
      site_uses[key].push_back(e);
    }
    double p = pow_int(1.0 / (2.0 * d), n);
    for (const auto& [site, uses] : site_uses) {
      double expect = 0.0;
      for (const auto& [b, mass] : quad) {
        double f = 1.0;
        for (int e : uses) f *= 1.0 + e * b;
        expect += mass * f;
      }
      p *= expect;
    }
    out.push_back({std::move(a.path), p});
  }
  return out;
}

std::vector<PathAtom> enumerate_constructed(int d, int n, const CookieEnvironment& env) {
  check_instance(d, n, 1e5);
  std::vector<PathAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(pow_int(2.0 * d, n)));
  Dfs dfs(d, n);
  const double p_eta = 1.0 / d;
  const double p_vert_each = (1.0 - p_eta) / (2.0 * (d - 1));

  // Each site coin zeta_k(y) is consumed at most once along a path (the k-th
  // arrival is unique), so branching at first use is the exact pushforward.
  auto rec = [&](auto&& self, int depth, double p) -> void {
    if (depth == n) {
      atoms.push_back({dfs.code, p});
      return;
    }
    std::int32_t k = dfs.visit_k();
    double b = env.beta(dfs.pos.data(), d, k);  // k > m -> 0 -> fair xi coin
    for (int c = 0; c < 2 * d; ++c) {
      double factor;
      if (c == 0)
        factor = p_eta * 0.5 * (1.0 + b);
      else if (c == 1)
        factor = p_eta * 0.5 * (1.0 - b);
      else
        factor = p_vert_each;
      dfs.move(static_cast<std::uint8_t>(c));
      self(self, depth + 1, p * factor);
      dfs.unmove();
    }
  };
  rec(rec, 0, 1.0);
  return atoms;
}

double oracle_expectation(const std::vector<PathAtom>& atoms,
                          const std::function<double(const Trajectory&)>& f, int d,
                          const CookieEnvironment* env) {
  double sum = 0.0, comp = 0.0;  // Kahan
  for (const PathAtom& a : atoms) {
    Trajectory traj = replay(d, a.path, env);
    double term = f(traj) * a.probability;
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double total_variation(const std::vector<PathAtom>& a, const std::vector<PathAtom>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("total_variation: size mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].path != b[i].path) throw std::invalid_argument("total_variation: path order mismatch");
    tv += std::fabs(a[i].probability - b[i].probability);
  }
  return 0.5 * tv;
}

// --- rational mode ------------------------------------------------------------------

namespace {
__int128 igcd(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}
constexpr __int128 kRationalLimit = static_cast<__int128>(1) << 96;
}  // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  reduce();
}

void Rational::reduce() {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = igcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num > kRationalLimit || -num > kRationalLimit || den > kRationalLimit)
    throw std::overflow_error("Rational: overflow");
}

Rational Rational::operator+(const Rational& o) const {
  Rational r;
  r.num = num * o.den + o.num * den;
  r.den = den * o.den;
  r.reduce();
  return r;
}

Rational Rational::operator-(const Rational& o) const {
  Rational r;
  r.num = num * o.den - o.num * den;
  r.den = den * o.den;
  r.reduce();
  return r;
}

Rational Rational::operator*(const Rational& o) const {
  Rational r;
  r.num = num * o.num;
  r.den = den * o.den;
  r.reduce();
  return r;
}

bool Rational::operator==(const Rational& o) const { return num == o.num && den == o.den; }

double Rational::to_double() const {
  return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<RationalAtom> enumerate_rational(int d, int n, long long beta_num, long long beta_den,
                                             int m) {
  if (n > 6) throw std::invalid_argument("enumerate_rational: n <= 6 required");
  check_instance(d, n, 1e5);
  if (beta_den <= 0 || std::abs(beta_num) > beta_den)
    throw std::invalid_argument("enumerate_rational: |beta| <= 1 required");

  std::vector<RationalAtom> atoms;
  Dfs dfs(d, n);
  const Rational inv2d(1, 2LL * d);
  const Rational plus = Rational(beta_den + beta_num, beta_den) * inv2d;
  const Rational minus = Rational(beta_den - beta_num, beta_den) * inv2d;

  auto rec = [&](auto&& self, int depth, Rational p) -> void {
    if (depth == n) {
      atoms.push_back({dfs.code, p});
      return;
    }
    std::int32_t k = dfs.visit_k();
    bool cookie = visited_fewer_than(k, m);
    for (int c = 0; c < 2 * d; ++c) {
      Rational factor = inv2d;
      if (cookie && c == 0) factor = plus;
      if (cookie && c == 1) factor = minus;
      dfs.move(static_cast<std::uint8_t>(c));
      self(self, depth + 1, p * factor);
      dfs.unmove();
    }
  };
  rec(rec, 0, Rational(1, 1));
  return atoms;
}

Rational oracle_expectation_rational(const std::vector<RationalAtom>& atoms,
                                     const std::function<Rational(const Trajectory&)>& f, int d) {
  Rational sum(0, 1);
  for (const RationalAtom& a : atoms) {
    Trajectory traj = replay(d, a.path);
    sum = sum + f(traj) * a.probability;
  }
  return sum;
}

}  // namespace oracle
}  // namespace erw
