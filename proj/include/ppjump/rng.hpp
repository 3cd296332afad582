#ifndef PPJUMP_RNG_HPP
#define PPJUMP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace ppjump {

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of path `path_index` under `master_seed`:
///   mix64(master_seed + (path_index + 1) * 0x9e3779b97f4a7c15).
/// For a fixed master seed distinct indices give distinct seeds, since the
/// golden-ratio increment is odd and mix64 is bijective.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t path_index) {
  return mix64(master_seed + (path_index + 1) * 0x9e3779b97f4a7c15ULL);
}

/// Per-path random stream. Only the raw 64-bit engine output is used; all
/// variates are built here so the sequence is identical on every platform
/// (std::*_distribution output is implementation-defined).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

inline RngStream rng_stream_for_path(std::uint64_t master_seed, std::uint64_t path_index) {
  return RngStream(stream_seed(master_seed, path_index));
}

}  // namespace ppjump

#endif  // PPJUMP_RNG_HPP
