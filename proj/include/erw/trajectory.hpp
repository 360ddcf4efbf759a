#pragma once

#include <cstdint>
#include <vector>

#include "erw/lattice.hpp"

namespace erw {

/// A realized walk path Y_0=0,...,Y_n with the bookkeeping downstream
/// estimators need: horizontal increments E_j, move flags eta_j, per-time
/// visit indices k_j (arrival counts) and the cookie value applied per step.
struct Trajectory {
  int dim = 0;
  std::vector<std::int32_t> positions;   // (n+1) x dim, row-major
  std::vector<std::int8_t> horiz_increments;  // E_j in {-1,0,+1}, length n
  std::vector<std::uint8_t> move_flags;       // eta_j = 1 iff step j is horizontal
  std::vector<std::int32_t> visit_index;      // k_j >= 1, length n+1
  std::vector<double> cookie_used;            // beta applied at step j (0 if none)

  std::size_t length() const { return horiz_increments.size(); }

  const std::int32_t* site(std::size_t j) const { return &positions[j * dim]; }

  LatticePoint position(std::size_t j) const {
    LatticePoint p = LatticePoint::origin(dim);
    for (int i = 0; i < dim; ++i) p.c[i] = positions[j * dim + i];
    return p;
  }

  std::int32_t horizontal(std::size_t j) const { return positions[j * dim]; }

  bool vertical_equal(std::size_t j, std::size_t l) const {
    for (int i = 1; i < dim; ++i)
      if (positions[j * dim + i] != positions[l * dim + i]) return false;
    return true;
  }
};

/// {Y_j in-exactly-k}: the site was visited exactly k-1 times before time j,
/// i.e. time j is the k-th arrival. Used by the per-cookie Girsanov factors.
inline bool visited_exactly(std::int32_t k_j, int k) { return k_j == k; }

/// {Y_j not-in^m}: fewer than m visits before time j (k_j <= m). Used by
/// N_T^m, U_T^m and the identical-cookie weight products.
inline bool visited_fewer_than(std::int32_t k_j, int m) { return k_j <= m; }

}  // namespace erw
