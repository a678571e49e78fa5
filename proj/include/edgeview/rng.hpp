#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace edgeview {

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(base);
  for (auto p : path) s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return s;
}

// Named sub-streams so that changing one part of a trial (say, an edge user
// position) leaves every other draw untouched.
enum class Stream : std::uint64_t {
  CenterPlacement = 1,
  EdgePlacement = 2,
  Channel = 3,
  Payload = 4,
  Preamble = 5,
  Noise = 6,
  PilotNoise = 7,
  Shadowing = 8,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  Rng substream(Stream s, std::initializer_list<std::uint64_t> path = {}) const {
    std::uint64_t seed = derive_seed(seed_, {static_cast<std::uint64_t>(s)});
    for (auto p : path) seed = derive_seed(seed, {p});
    return Rng(seed);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace edgeview
