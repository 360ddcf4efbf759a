#include <doctest.h>

#include <cmath>
#include <map>

#include "erw/girsanov.hpp"
#include "erw/oracle.hpp"
#include "erw/rng.hpp"

using namespace erw;
using namespace erw::oracle;

TEST_CASE("single-step probabilities match the transition rule") {
  CookieEnvironment env = CookieEnvironment::deterministic(0.5, 1);
  auto atoms = enumerate_paths(2, 1, env);
  REQUIRE(atoms.size() == 4);
  std::map<int, double> by_code;
  for (const PathAtom& a : atoms) by_code[a.path[0]] = a.probability;
  CHECK(by_code[0] == doctest::Approx(1.5 / 4.0));  // +e1
  CHECK(by_code[1] == doctest::Approx(0.5 / 4.0));  // -e1
  CHECK(by_code[2] == doctest::Approx(0.25));       // +e2
  CHECK(by_code[3] == doctest::Approx(0.25));       // -e2
}

TEST_CASE("path probabilities sum to one on random instances") {
  RandomStream rng({31, 0});
  for (int trial = 0; trial < 10; ++trial) {
    int n = 1 + static_cast<int>(rng.next_index(6));
    double beta = rng.next_double() * 2.0 - 1.0;
    int m = 1 + static_cast<int>(rng.next_index(3));
    auto atoms = enumerate_paths(2, n, CookieEnvironment::deterministic(beta, m));
    double sum = 0.0;
    for (const PathAtom& a : atoms) sum += a.probability;
    CHECK(std::fabs(sum - 1.0) < 1e-14);
  }
}

TEST_CASE("annealed mixture of constant environments is the average of quenched laws") {
  auto mixed = enumerate_annealed(2, 2,
                                  {{CookieEnvironment::deterministic(0.2, 1), 0.5},
                                   {CookieEnvironment::deterministic(0.6, 1), 0.5}});
  auto a = enumerate_paths(2, 2, CookieEnvironment::deterministic(0.2, 1));
  auto b = enumerate_paths(2, 2, CookieEnvironment::deterministic(0.6, 1));
  for (std::size_t i = 0; i < mixed.size(); ++i)
    CHECK(mixed[i].probability ==
          doctest::Approx(0.5 * (a[i].probability + b[i].probability)).epsilon(1e-14));
}

TEST_CASE("annealed iid law matches a brute-force site-assignment sum") {
  MarginalLaw law = MarginalLaw::atoms({{0.2, 0.5}, {0.6, 0.5}});
  auto fast = enumerate_annealed_iid(2, 2, law, 1);
  auto base = enumerate_paths(2, 2, CookieEnvironment::deterministic(0.0, 1));
  for (std::size_t i = 0; i < fast.size(); ++i) {
    Trajectory traj = replay(2, base[i].path);
    // enumerate the two values on each of the (at most 3) sites of the path
    std::map<std::vector<std::int32_t>, int> site_ids;
    for (std::size_t j = 0; j <= traj.length(); ++j) {
      std::vector<std::int32_t> key(traj.site(j), traj.site(j) + 2);
      site_ids.emplace(key, static_cast<int>(site_ids.size()));
    }
    int ns = static_cast<int>(site_ids.size());
    double total = 0.0;
    for (int mask = 0; mask < (1 << ns); ++mask) {
      double p = 1.0 / 16.0;  // (1/2d)^n
      for (std::size_t j = 0; j < traj.length(); ++j) {
        int e = traj.horiz_increments[j];
        if (e == 0 || traj.visit_index[j] > 1) continue;
        std::vector<std::int32_t> key(traj.site(j), traj.site(j) + 2);
        double b = (mask >> site_ids[key]) & 1 ? 0.6 : 0.2;
        p *= 1.0 + e * b;
      }
      total += p / static_cast<double>(1 << ns);
    }
    CHECK(fast[i].probability == doctest::Approx(total).epsilon(1e-13));
  }
}

TEST_CASE("oracle expectations: symmetry and density normalization") {
  CookieEnvironment p0 = CookieEnvironment::deterministic(0.0, 1);
  CookieEnvironment env = CookieEnvironment::deterministic(0.5, 1);
  auto p0_atoms = enumerate_paths(2, 3, p0);

  double ex = oracle_expectation(
      p0_atoms, [](const Trajectory& t) { return static_cast<double>(t.horizontal(t.length())); },
      2);
  CHECK(std::fabs(ex) < 1e-14);

  double em = oracle_expectation(
      p0_atoms, [&](const Trajectory& t) { return weight(t, env, t.length()).value(); }, 2);
  CHECK(std::fabs(em - 1.0) < 1e-12);
}

TEST_CASE("two exact routes to E_beta[X_3] agree") {
  CookieEnvironment p0 = CookieEnvironment::deterministic(0.0, 1);
  CookieEnvironment env = CookieEnvironment::deterministic(0.5, 1);
  auto quenched = enumerate_paths(2, 3, env);
  auto p0_atoms = enumerate_paths(2, 3, p0);

  auto x3 = [](const Trajectory& t) { return static_cast<double>(t.horizontal(t.length())); };
  double direct = oracle_expectation(quenched, x3, 2);
  double reweighted = oracle_expectation(
      p0_atoms, [&](const Trajectory& t) { return x3(t) * weight(t, env, t.length()).value(); },
      2);
  CHECK(std::fabs(direct - reweighted) < 1e-12);
}

TEST_CASE("construction pushforward reproduces the quenched law") {
  for (int d : {2, 3}) {
    int n = d == 2 ? 3 : 2;
    CookieEnvironment env = CookieEnvironment::deterministic(0.5, 1);
    auto direct = enumerate_paths(d, n, env);
    auto constructed = enumerate_constructed(d, n, env);
    CHECK(total_variation(direct, constructed) < 1e-12);
  }
}

TEST_CASE("exact-rational mode: normalization and martingale mean are exact") {
  auto atoms = enumerate_rational(2, 4, 1, 2, 1);  // beta = 1/2
  Rational sum(0, 1);
  for (const RationalAtom& a : atoms) sum = sum + a.probability;
  CHECK(sum == Rational(1, 1));

  auto p0 = enumerate_rational(2, 4, 0, 1, 1);
  Rational em = oracle_expectation_rational(
      p0,
      [](const Trajectory& t) {
        // M_n(1/2) as an exact rational: factors (1 +- 1/2) at fresh steps
        Rational m(1, 1);
        for (std::size_t j = 0; j < t.length(); ++j) {
          int e = t.horiz_increments[j];
          if (e == 0 || t.visit_index[j] > 1) continue;
          m = m * (e > 0 ? Rational(3, 2) : Rational(1, 2));
        }
        return m;
      },
      2);
  CHECK(em == Rational(1, 1));
}

TEST_CASE("instance guard rejects oversized enumerations") {
  CHECK_THROWS_AS(enumerate_paths(2, 15, CookieEnvironment::deterministic(0.0, 1)),
                  std::invalid_argument);
}
