#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace mpsim {

// splitmix64 finalizer, used to derive substream seeds and one-shot draws.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Named substreams of a run's master seed. Each generation stage draws from
// its own stream so that changing one knob (say the sensing error level)
// cannot shift the arrival pattern of an otherwise paired run.
enum class Stream : std::uint64_t {
  kDemand = 0x01,
  kDestination = 0x02,
  kOccupancy = 0x03,
  kRouting = 0x04,
  kBusSchedule = 0x05,
  kBusOccupancy = 0x06,
  kCvFlags = 0x07,
  kApcNoise = 0x08,
  kSaturationNoise = 0x09,
  kStability = 0x0a,
};

constexpr std::uint64_t substream_seed(std::uint64_t master, Stream s,
                                       std::uint64_t a = 0,
                                       std::uint64_t b = 0) noexcept {
  std::uint64_t h = mix64(master ^ (0x6d7073696d2e726eULL + (static_cast<std::uint64_t>(s) << 32)));
  h = mix64(h ^ a);
  return mix64(h ^ b);
}

// mt19937_64 with hand-rolled transforms. The standard pins the engine's
// output sequence but not the library distributions, so every distribution
// the simulator needs is implemented here and stays bit-stable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    std::uint64_t threshold = (-n) % n;
    for (;;) {
      std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  double exponential(double mean) {
    // log1p keeps the argument away from log(0) since uniform01() < 1.
    return -mean * std::log1p(-uniform01());
  }

  double normal(double mu, double sigma) {
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * r * std::cos(2.0 * 3.141592653589793238462643 * u2);
  }

  double truncated_normal(double mu, double sigma, double lo, double hi) {
    for (int i = 0; i < 256; ++i) {
      double v = normal(mu, sigma);
      if (v >= lo && v <= hi) return v;
    }
    return std::min(hi, std::max(lo, mu));
  }

  // Index into a probability vector (must sum to ~1).
  std::size_t discrete(const std::vector<double>& probs) {
    double u = uniform01();
    double acc = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;
  }

  // One-shot draws keyed by (seed, counter): order-independent by design.
  static bool bernoulli_at(std::uint64_t seed, double p) {
    Rng r(seed);
    return r.bernoulli(p);
  }

  static double normal_at(std::uint64_t seed, double mu, double sigma) {
    Rng r(seed);
    return r.normal(mu, sigma);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mpsim
