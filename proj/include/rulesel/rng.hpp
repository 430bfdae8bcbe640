#ifndef RULESEL_RNG_HPP
#define RULESEL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace rulesel {

// Seeded random stream. Every stage of the pipeline owns its own stream,
// derived from the master seed and a stream name, so the draw count of one
// stage cannot perturb another.
//
// All variate mappings are implemented here (not via std::*_distribution)
// so streams are bit-stable across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : name) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  // Named sub-stream: independent of sibling streams and of how many draws
  // they have consumed.
  static Rng derive(std::uint64_t master, std::string_view stream,
                    std::uint64_t ordinal = 0) {
    return Rng(mix(mix(master ^ hash_name(stream)) ^ ordinal));
  }

  std::uint64_t next() { return engine_(); }

  // uniform in [0,1)
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // uniform in the open interval (0,1); keeps -log(-log u) finite
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::size_t index(std::size_t n) {
    // rejection to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  // standard normal, Box-Muller with cached spare
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

  double gumbel() { return -std::log(-std::log(uniform_open())); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rulesel

#endif  // RULESEL_RNG_HPP
