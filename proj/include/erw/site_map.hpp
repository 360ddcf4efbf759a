#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "erw/rng.hpp"

namespace erw {

// Open-addressing hash map keyed by lattice sites, tuned for the two hot loops
// (visit counting, cut detection). Keys are packed 21-bit signed fields, three
// coordinates per word, so equality is exact for |coord| <= 2^20 (every walk
// here is far shorter than that). clear() is O(1) via epoch tagging.
template <class Value>
class SiteHashMap {
 public:
  explicit SiteHashMap(int dim, std::size_t initial_slots = 1024)
      : dim_(dim), words_(static_cast<std::size_t>((dim + 2) / 3)) {
    if (dim < 1 || dim > 18) throw std::invalid_argument("SiteHashMap: bad dimension");
    std::size_t cap = 64;
    while (cap < initial_slots) cap <<= 1;
    rebuild(cap);
  }

  void clear() {
    ++epoch_;
    count_ = 0;
    entries_.clear();
    if (epoch_ == 0) {  // wrapped: all tags stale-looking, wipe them
      std::fill(epochs_.begin(), epochs_.end(), 0u);
      epoch_ = 1;
    }
  }

  std::size_t size() const { return count_; }

  /// find-or-insert with value-initialized payload.
  Value& operator[](const std::int32_t* coords) {
    std::uint64_t kb[6];
    pack(coords, kb);
    std::size_t idx = probe(kb);
    if (epochs_[idx] != epoch_) {
      claim(idx, kb);
    }
    return values_[idx];
  }

  Value* find(const std::int32_t* coords) {
    std::uint64_t kb[6];
    pack(coords, kb);
    std::size_t idx = probe(kb);
    return epochs_[idx] == epoch_ ? &values_[idx] : nullptr;
  }

  /// Inserts if absent; returns (value, inserted).
  std::pair<Value*, bool> insert(const std::int32_t* coords) {
    std::uint64_t kb[6];
    pack(coords, kb);
    std::size_t idx = probe(kb);
    bool fresh = epochs_[idx] != epoch_;
    if (fresh) claim(idx, kb);
    return {&values_[idx], fresh};
  }

  template <class F>
  void for_each_value(F&& f) {
    for (std::size_t idx : entries_) f(values_[idx]);
  }

 private:
  void pack(const std::int32_t* coords, std::uint64_t* kb) const {
    constexpr std::int32_t kLim = 1 << 20;
    std::size_t w = 0;
    std::uint64_t acc = 0;
    int shift = 0;
    for (int i = 0; i < dim_; ++i) {
      std::int32_t v = coords[i];
      if (v < -kLim || v >= kLim) throw std::out_of_range("SiteHashMap: coordinate too large");
      acc |= (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v + kLim)) & 0x1FFFFFull)
             << shift;
      shift += 21;
      if (shift == 63) {
        kb[w++] = acc;
        acc = 0;
        shift = 0;
      }
    }
    if (shift != 0) kb[w++] = acc;
  }

  std::uint64_t hash(const std::uint64_t* kb) const {
    std::uint64_t h = 0x2545F4914F6CDD1Dull;
    for (std::size_t i = 0; i < words_; ++i) h = mix64(h ^ kb[i]);
    return h;
  }

  std::size_t probe(const std::uint64_t* kb) {
    if ((count_ + 1) * 2 > mask_ + 1) grow();
    std::size_t idx = hash(kb) & mask_;
    while (epochs_[idx] == epoch_) {
      if (std::memcmp(&keys_[idx * words_], kb, words_ * sizeof(std::uint64_t)) == 0) return idx;
      idx = (idx + 1) & mask_;
    }
    return idx;
  }

  void claim(std::size_t idx, const std::uint64_t* kb) {
    epochs_[idx] = epoch_;
    std::memcpy(&keys_[idx * words_], kb, words_ * sizeof(std::uint64_t));
    values_[idx] = Value{};
    entries_.push_back(static_cast<std::uint32_t>(idx));
    ++count_;
  }

  void rebuild(std::size_t cap) {
    keys_.assign(cap * words_, 0);
    values_.assign(cap, Value{});
    epochs_.assign(cap, 0u);
    entries_.clear();
    mask_ = cap - 1;
    count_ = 0;
    epoch_ = 1;
  }

  void grow() {
    std::vector<std::uint64_t> old_keys = std::move(keys_);
    std::vector<Value> old_values = std::move(values_);
    std::vector<std::uint32_t> old_entries = std::move(entries_);
    std::size_t cap = (mask_ + 1) * 2;
    rebuild(cap);
    for (std::uint32_t idx : old_entries) {
      const std::uint64_t* kb = &old_keys[static_cast<std::size_t>(idx) * words_];
      std::size_t slot = hash(kb) & mask_;
      while (epochs_[slot] == epoch_) slot = (slot + 1) & mask_;
      epochs_[slot] = epoch_;
      std::memcpy(&keys_[slot * words_], kb, words_ * sizeof(std::uint64_t));
      values_[slot] = old_values[idx];
      entries_.push_back(static_cast<std::uint32_t>(slot));
      ++count_;
    }
  }

  int dim_;
  std::size_t words_;
  std::vector<std::uint64_t> keys_;
  std::vector<Value> values_;
  std::vector<std::uint32_t> epochs_;
  std::vector<std::uint32_t> entries_;
  std::size_t mask_ = 0;
  std::size_t count_ = 0;
  std::uint32_t epoch_ = 1;
};

}  // namespace erw
