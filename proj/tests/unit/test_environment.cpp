#include <doctest.h>

#include <cmath>

#include "erw/environment.hpp"
#include "erw/rng.hpp"
#include "erw/stats.hpp"

using namespace erw;

namespace {
LatticePoint pt(std::initializer_list<std::int32_t> coords) {
  LatticePoint p = LatticePoint::origin(static_cast<int>(coords.size()));
  int i = 0;
  for (std::int32_t c : coords) p.c[i++] = c;
  return p;
}
}  // namespace

TEST_CASE("deterministic stacks and exhaustion") {
  CookieEnvironment env = CookieEnvironment::deterministic(0.4, 2);
  LatticePoint y = pt({5, -3});
  CHECK(env.beta(y, 1) == 0.4);
  CHECK(env.beta(y, 2) == 0.4);
  CHECK(env.beta(y, 3) == 0.0);  // no cookie left
  CHECK_THROWS_AS(env.beta(y, 0), std::invalid_argument);

  CookieEnvironment stack = CookieEnvironment::deterministic_stack({0.5, -0.25});
  CHECK(stack.beta(y, 1) == 0.5);
  CHECK(stack.beta(y, 2) == -0.25);
  CHECK(stack.beta(y, 3) == 0.0);

  CookieEnvironment inf = CookieEnvironment::deterministic(0.3, kInfiniteCookies);
  CHECK(inf.beta(y, 1000000) == 0.3);
}

TEST_CASE("lazy environments are quenched-consistent") {
  MarginalLaw law = MarginalLaw::atoms({{0.2, 0.5}, {0.6, 0.5}});
  CookieEnvironment env = CookieEnvironment::iid(17, law, 1, true);
  LatticePoint y = pt({1, 2});
  double b1 = env.beta(y, 1);
  double b2 = env.beta(y, 1);
  CHECK(b1 == b2);
  CHECK((b1 == 0.2 || b1 == 0.6));

  // interleaved lookups at other sites do not disturb the field
  for (int i = 0; i < 100; ++i) env.beta(pt({i, -i}), 1);
  CHECK(env.beta(y, 1) == b1);
}

TEST_CASE("vertical-stationary environments ignore the horizontal coordinate") {
  MarginalLaw law = MarginalLaw::uniform(-0.5, 0.5);
  CookieEnvironment env = CookieEnvironment::vertical_stationary(9, law, 1, true);
  double b = env.beta(pt({0, 4, -1}), 1);
  for (std::int32_t x : {-10, -1, 3, 1000}) CHECK(env.beta(pt({x, 4, -1}), 1) == b);
  CHECK(env.beta(pt({0, 5, -1}), 1) != b);
}

TEST_CASE("interpolation endpoints and arithmetic") {
  CookieEnvironment lo = CookieEnvironment::deterministic(0.2, 1);
  CookieEnvironment hi = CookieEnvironment::deterministic(0.6, 1);
  CookieEnvironment pair = CookieEnvironment::coupled(lo, hi, 0.25);
  LatticePoint y = pt({3, 4});
  CHECK(interpolate(pair, 0.0).beta(y, 1) == doctest::Approx(0.2));
  CHECK(interpolate(pair, 1.0).beta(y, 1) == doctest::Approx(0.6));
  CHECK(interpolate(pair, 0.5).beta(y, 1) == doctest::Approx(0.4));
  CHECK_THROWS_AS(interpolate(pair, 1.5), std::invalid_argument);
}

TEST_CASE("monotone coupling is pointwise ordered in t") {
  MarginalLaw lo_law = MarginalLaw::atoms({{-0.2, 0.25}, {0.1, 0.75}});
  MarginalLaw hi_law = MarginalLaw::atoms({{0.0, 0.25}, {0.5, 0.75}});
  CookieEnvironment lo = CookieEnvironment::iid(5, lo_law, 3, false);
  CookieEnvironment hi = CookieEnvironment::iid(5, hi_law, 3, false);
  CookieEnvironment pair = CookieEnvironment::coupled(lo, hi, 0.0);
  RandomStream rng({77, 0});
  for (int trial = 0; trial < 500; ++trial) {
    LatticePoint y = pt({static_cast<std::int32_t>(rng.next_index(100)) - 50,
                         static_cast<std::int32_t>(rng.next_index(100)) - 50});
    int k = 1 + static_cast<int>(rng.next_index(3));
    double t1 = rng.next_double();
    double t2 = t1 + (1.0 - t1) * rng.next_double();
    auto [b_lo, b_hi] = pair.beta_pair(y.c.data(), y.dim, k);
    CHECK(b_lo <= b_hi);
    CHECK(pair.at_t(t1).beta(y, k) <= pair.at_t(t2).beta(y, k) + 1e-15);
  }
}

TEST_CASE("coupling rejects unordered laws") {
  MarginalLaw a = MarginalLaw::atoms({{0.3, 0.5}, {0.4, 0.5}});
  MarginalLaw b = MarginalLaw::atoms({{0.1, 0.5}, {0.9, 0.5}});
  CookieEnvironment ea = CookieEnvironment::iid(5, a, 1, true);
  CookieEnvironment eb = CookieEnvironment::iid(5, b, 1, true);
  CHECK_THROWS_AS(CookieEnvironment::coupled(ea, eb, 0.5), std::invalid_argument);
  CHECK_NOTHROW(CookieEnvironment::coupled(eb.with_seed(5), eb, 0.5));
}

TEST_CASE("sigma bound holds on every lookup") {
  MarginalLaw law = MarginalLaw::uniform(-0.35, 0.35);
  CookieEnvironment env = CookieEnvironment::iid(2, law, 2, false);
  CHECK(env.sigma_bound() == doctest::Approx(0.35));
  RandomStream rng({78, 0});
  for (int trial = 0; trial < 2000; ++trial) {
    LatticePoint y = pt({static_cast<std::int32_t>(rng.next_index(1000)) - 500,
                         static_cast<std::int32_t>(rng.next_index(1000)) - 500});
    double b = env.beta(y, 1 + static_cast<int>(rng.next_index(2)));
    CHECK(std::fabs(b) <= 0.35);
  }
}

TEST_CASE("e1 permutation: identity, transposition, and validation") {
  MarginalLaw law = MarginalLaw::atoms({{0.2, 0.5}, {0.6, 0.5}});
  CookieEnvironment env = CookieEnvironment::iid(11, law, 2, true);
  std::vector<LatticePoint> sites = {pt({0, 0}), pt({1, 0}), pt({0, 1})};
  EnvSample sample = materialize(env, sites, 2);

  CHECK(e1_permute(sample, {}) == sample);

  LinePermutation swap01;
  swap01[{0}] = {{0, 1}, {1, 0}};
  EnvSample swapped = e1_permute(sample, swap01);
  CHECK(swapped.at(pt({0, 0})) == sample.at(pt({1, 0})));
  CHECK(swapped.at(pt({1, 0})) == sample.at(pt({0, 0})));
  CHECK(swapped.at(pt({0, 1})) == sample.at(pt({0, 1})));

  LinePermutation collide;
  collide[{0}] = {{0, 1}, {1, 1}};
  CHECK_THROWS_AS(e1_permute(sample, collide), std::invalid_argument);
}

TEST_CASE("permutation invariance of the iid law (two-sample chi-square)") {
  // Law of (beta(0,0), beta(1,0)) with and without an e1 swap, over fresh
  // draws of the environment; i.i.d. fields are exchangeable so the two
  // samples follow one law.
  MarginalLaw law = MarginalLaw::atoms({{0.2, 0.5}, {0.6, 0.5}});
  const int draws = 10000;
  std::array<double, 4> plain{}, permuted{};
  LinePermutation swap01;
  swap01[{0}] = {{0, 1}, {1, 0}};
  std::vector<LatticePoint> sites = {pt({0, 0}), pt({1, 0})};
  for (int i = 0; i < draws; ++i) {
    CookieEnvironment env = CookieEnvironment::iid(1000 + i, law, 1, true);
    EnvSample sample = materialize(env, sites, 1);
    EnvSample swapped = e1_permute(sample, swap01);
    auto cell = [](const EnvSample& s) {
      int a = s.begin()->second[0] == 0.6 ? 1 : 0;
      int b = std::next(s.begin())->second[0] == 0.6 ? 1 : 0;
      return 2 * a + b;
    };
    plain[cell(sample)] += 1.0;
    permuted[cell(swapped)] += 1.0;
  }
  double chi2 = 0.0;
  for (int c = 0; c < 4; ++c) {
    double pooled = 0.5 * (plain[c] + permuted[c]);
    chi2 += (plain[c] - pooled) * (plain[c] - pooled) / pooled;
    chi2 += (permuted[c] - pooled) * (permuted[c] - pooled) / pooled;
  }
  CHECK(chi_square_sf(chi2, 3) > 0.01);
}

TEST_CASE("environment text forms round-trip") {
  std::vector<std::string> specs = {
      "det(beta=0.5,m=1)",
      "det(beta=0.29999999999999999,m=inf)",
      "det(stack=0.5|-0.25)",
      "iid(seed=17,m=2,iden=1,law=atoms(0.2@0.5,0.59999999999999998@0.5))",
      "vert(seed=9,m=1,iden=0,law=uniform(-0.5,0.5))",
      "pair(t=0.5,lower=iid(seed=3,m=1,iden=1,law=atoms(0.1@1)),upper=iid(seed=3,m=1,iden=1,law=atoms(0.3@1)))",
  };
  for (const std::string& text : specs) {
    CookieEnvironment env = CookieEnvironment::parse(text);
    CHECK(CookieEnvironment::parse(env.text()).text() == env.text());
  }
  CHECK_THROWS(CookieEnvironment::parse("bogus(1)"));
  CHECK_THROWS(MarginalLaw::parse("atoms(1.5@1)"));  // outside [-1,1]
}
