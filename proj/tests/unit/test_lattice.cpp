#include <doctest.h>

#include <map>
#include <set>

#include "erw/lattice.hpp"
#include "erw/rng.hpp"
#include "erw/site_map.hpp"

using namespace erw;

TEST_CASE("unit moves") {
  LatticePoint p = LatticePoint::origin(2);
  LatticePoint q = step(p, {0, +1});
  CHECK(q.c[0] == 1);
  CHECK(q.c[1] == 0);

  LatticePoint r = LatticePoint::origin(2);
  r.c = {3, -2};
  LatticePoint s = step(r, {1, -1});
  CHECK(s.c[0] == 3);
  CHECK(s.c[1] == -3);

  CHECK_THROWS_AS(step(p, {5, +1}), std::invalid_argument);
}

TEST_CASE("step/unstep is the identity for random points") {
  RandomStream rng({3, 1});
  for (int trial = 0; trial < 100; ++trial) {
    int d = 2 + static_cast<int>(rng.next_index(6));
    LatticePoint p = LatticePoint::origin(d);
    for (int i = 0; i < d; ++i)
      p.c[i] = static_cast<std::int32_t>(rng.next_index(2001)) - 1000;
    Direction dir{static_cast<int>(rng.next_index(static_cast<std::uint32_t>(d))), +1};
    CHECK(step(step(p, dir), {dir.axis, -1}) == p);
  }
}

TEST_CASE("2d directions are distinct and closed under negation") {
  for (int d = 2; d <= 12; ++d) {
    auto dirs = all_directions(d);
    REQUIRE(dirs.size() == static_cast<std::size_t>(2 * d));
    std::set<std::pair<int, int>> seen;
    for (const Direction& dir : dirs) seen.insert({dir.axis, dir.sign});
    CHECK(seen.size() == dirs.size());
    for (const Direction& dir : dirs)
      CHECK(seen.count({dir.axis, -dir.sign}) == 1);
  }
}

TEST_CASE("horizontal/vertical split") {
  LatticePoint p = LatticePoint::origin(4);
  p.c = {7, 1, 2, 3};
  CHECK(p.horizontal() == 7);
  REQUIRE(p.vertical().size() == 3);
  CHECK(p.vertical()[0] == 1);
  CHECK(p.vertical()[2] == 3);
}

TEST_CASE("site map counts and survives clears and growth") {
  SiteHashMap<std::int32_t> map(3, 8);
  RandomStream rng({9, 2});
  for (int round = 0; round < 3; ++round) {
    map.clear();
    std::map<std::array<std::int32_t, 3>, std::int32_t> reference;
    for (int i = 0; i < 5000; ++i) {
      std::array<std::int32_t, 3> key = {
          static_cast<std::int32_t>(rng.next_index(17)) - 8,
          static_cast<std::int32_t>(rng.next_index(17)) - 8,
          static_cast<std::int32_t>(rng.next_index(17)) - 8,
      };
      ++map[key.data()];
      ++reference[key];
    }
    REQUIRE(map.size() == reference.size());
    for (const auto& [key, count] : reference) {
      auto* v = map.find(key.data());
      REQUIRE(v != nullptr);
      CHECK(*v == count);
    }
  }
}

TEST_CASE("site map insert reports freshness") {
  SiteHashMap<std::int32_t> map(2);
  std::int32_t a[2] = {1, 2};
  auto [v1, fresh1] = map.insert(a);
  CHECK(fresh1);
  auto [v2, fresh2] = map.insert(a);
  CHECK_FALSE(fresh2);
  CHECK(v1 == v2);
}
