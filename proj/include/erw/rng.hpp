#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace erw {

/// Names one reproducible random stream. (master_seed, stream_id) -> stream is a
/// pure function; distinct stream_ids give statistically independent streams.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy
// as 1, 2, 3", SC'11). Counter-based: the output is a pure function of (ctr, key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based uniform stream. The key carries the master seed, the counter
/// carries (block index, stream id), so streams never overlap and any draw is
/// reproducible from (SeedSpec, draw index) alone. Single-owner; creating
/// streams is thread-safe, sharing one instance between threads is not.
class RandomStream {
 public:
  explicit RandomStream(SeedSpec spec) : spec_(spec) {}

  std::uint64_t next_u64() {
    if (avail_ == 0) refill();
    return buf_[--avail_];
  }

  /// Uniform on [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on {0,...,n-1}. Multiply-shift mapping; bias is O(n/2^64).
  std::uint32_t next_index(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  const SeedSpec& spec() const { return spec_; }

 private:
  void refill();

  SeedSpec spec_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int avail_ = 0;
};

inline RandomStream derive_stream(SeedSpec spec) { return RandomStream(spec); }

// SplitMix64 finalizer; bijective on u64.
std::uint64_t mix64(std::uint64_t x);

/// Derives an unrelated master seed for a named phase of a run, so that
/// different batches sharing one user seed never reuse stream ids.
std::uint64_t derive_phase_seed(std::uint64_t master_seed, std::string_view phase);

/// Pure site-keyed hash used by lazy environments: a function of
/// (seed, coordinates, extra) only. Repeated calls always agree.
std::uint64_t hash_site(std::uint64_t seed, const std::int32_t* coords, int dim,
                        std::uint64_t extra);

inline double u64_to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace erw
