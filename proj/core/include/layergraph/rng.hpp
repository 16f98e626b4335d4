#pragma once

#include <cstdint>
#include <limits>

namespace layergraph {

/// What a random stream is used for; part of every stream key so that
/// independent purposes never share draws.
enum class Purpose : std::uint64_t {
  layer_type = 1,
  layer_nodes = 2,
  layer_edges = 3,
  site = 4,
  bond_overlay = 5,
  bond_layerwise = 6,
  coupling = 7,
  exploration = 8,
  extraction = 9,
  monte_carlo = 10,
};

inline constexpr const char* kGeneratorName = "xoshiro256** seeded by splitmix64 key hashing";

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless 64-bit mix of up to four words.
std::uint64_t hash_key(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                       std::uint64_t d = 0);

/// Uniform double in [0, 1) from a 64-bit word.
inline double to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// xoshiro256**; satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  /// Stream for (master, replicate, purpose, index).
  Rng(std::uint64_t master, std::uint64_t replicate, Purpose purpose, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  double uniform() { return to_unit((*this)()); }
  /// Uniform integer in [0, n) by Lemire's method.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
};

}  // namespace layergraph
