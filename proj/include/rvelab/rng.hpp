#pragma once

// Counter-based random streams: one key per realization, so draws do not
// depend on how realizations are distributed over workers.

#include <cstdint>
#include <limits>
#include <string_view>

namespace rvelab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Output n of the stream is mix64(key ^ mix64(n)). Satisfies
/// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(mix64(key)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ ^ mix64(counter_++)); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

constexpr std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of realization `index` of a (protocol, size) study cell.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view protocol, double size,
                                    std::uint64_t index) {
  auto size_bits = static_cast<std::uint64_t>(size * 1024.0);
  std::uint64_t h = mix64(master);
  h = mix64(h ^ hash_string(protocol));
  h = mix64(h ^ size_bits);
  return mix64(h ^ index);
}

}  // namespace rvelab
