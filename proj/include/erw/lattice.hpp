#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace erw {

inline constexpr int kMaxDim = 16;

/// A point of Z^d. Coordinate 0 is the excited (e1) axis; coordinates 1..d-1
/// form the vertical part, so horizontal/vertical projections are O(1).
struct LatticePoint {
  int dim = 0;
  std::array<std::int32_t, kMaxDim> c{};

  static LatticePoint origin(int d) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("lattice dimension out of range");
    LatticePoint p;
    p.dim = d;
    return p;
  }

  std::int32_t horizontal() const { return c[0]; }
  std::span<const std::int32_t> vertical() const { return {c.data() + 1, static_cast<size_t>(dim - 1)}; }
  std::span<const std::int32_t> coords() const { return {c.data(), static_cast<size_t>(dim)}; }

  friend bool operator==(const LatticePoint& a, const LatticePoint& b) {
    if (a.dim != b.dim) return false;
    for (int i = 0; i < a.dim; ++i)
      if (a.c[i] != b.c[i]) return false;
    return true;
  }
  friend bool operator<(const LatticePoint& a, const LatticePoint& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    for (int i = 0; i < a.dim; ++i)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  }
};

/// One of the 2d unit moves: axis in [0,d), sign = +-1.
struct Direction {
  int axis = 0;
  int sign = +1;

  friend bool operator==(const Direction&, const Direction&) = default;
};

/// All 2d directions in the fixed order +e1,-e1,+e2,-e2,...; closed under negation.
inline std::vector<Direction> all_directions(int d) {
  std::vector<Direction> out;
  out.reserve(2 * d);
  for (int axis = 0; axis < d; ++axis) {
    out.push_back({axis, +1});
    out.push_back({axis, -1});
  }
  return out;
}

inline LatticePoint step(const LatticePoint& p, Direction dir) {
  if (dir.axis < 0 || dir.axis >= p.dim) throw std::invalid_argument("step: axis out of range");
  LatticePoint q = p;
  q.c[dir.axis] += dir.sign;
  return q;
}

}  // namespace erw
