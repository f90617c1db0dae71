#pragma once

#include <cstdint>
#include <random>

namespace cperc {

// Seeded 64-bit Mersenne Twister with explicit conversions, so streams are reproducible across standard libraries.
class Rng {
 public:
  static constexpr const char* algorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed = 5489u) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
  bool bit() { return (eng_() >> 63) != 0; }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t below(std::uint64_t n) {
    return std::uint64_t((static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace cperc
