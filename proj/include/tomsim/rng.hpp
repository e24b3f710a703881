#pragma once
#include <cstdint>
#include <string_view>

namespace tomsim {

// Counter-based stream: draw i is hash(key, i). Substreams re-key by label,
// so interleaving new draws in one component never shifts another's sequence.
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed) : key_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  RandomSource sub(uint64_t label) const {
    RandomSource r(*this);
    r.key_ = mix(key_ ^ mix(label + 0x165667b19e3779f9ull));
    r.ctr_ = 0;
    return r;
  }

  RandomSource sub(std::string_view label) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : label) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
    return sub(h);
  }

  uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  uint64_t key_ = 0;
  uint64_t ctr_ = 0;
};

}  // namespace tomsim
