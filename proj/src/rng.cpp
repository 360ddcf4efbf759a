#include "erw/rng.hpp"

namespace erw {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> round_once(const std::array<std::uint32_t, 4>& c,
                                               const std::array<std::uint32_t, 2>& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, c[0], hi0, lo0);
  mulhilo(kPhiloxM1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    ctr = round_once(ctr, key);
  }
  return ctr;
}

void RandomStream::refill() {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_),
      static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(spec_.stream_id),
      static_cast<std::uint32_t>(spec_.stream_id >> 32),
  };
  std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(spec_.master_seed),
      static_cast<std::uint32_t>(spec_.master_seed >> 32),
  };
  std::array<std::uint32_t, 4> out = philox4x32_10(ctr, key);
  buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  avail_ = 2;
  ++block_;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_phase_seed(std::uint64_t master_seed, std::string_view phase) {
  std::uint64_t h = mix64(master_seed ^ 0x5851F42D4C957F2Dull);
  for (unsigned char ch : phase) h = mix64(h ^ ch);
  return h;
}

std::uint64_t hash_site(std::uint64_t seed, const std::int32_t* coords, int dim,
                        std::uint64_t extra) {
  std::uint64_t h = mix64(seed ^ 0xA0761D6478BD642Full);
  for (int i = 0; i < dim; ++i) {
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(coords[i])));
  }
  return mix64(h ^ extra);
}

}  // namespace erw
