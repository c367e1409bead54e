#pragma once
// Seed-reproducible random stream. Every random draw in the library flows
// through this wrapper so a simulation is fully determined by its seed.
// Doubles are built from raw generator bits rather than the standard
// distributions, which are not bit-identical across implementations.

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace psl {

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed_value() const { return seed_; }

  // Uniform on the half-open interval [-1, +1), 53-bit resolution.
  double uniform_pm1() {
    const std::uint64_t u = gen_() >> 11;  // top 53 bits
    return static_cast<double>(u) * 0x1.0p-52 - 1.0;
  }

  // Uniform integer in [0, n). Masked rejection keeps the draw unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RngStream::next_below: n must be positive");
    const std::uint64_t mask = std::bit_ceil(n) - 1;
    std::uint64_t x;
    do {
      x = gen_() & mask;
    } while (x >= n);
    return x;
  }

  std::int8_t random_spin() { return uniform_pm1() >= 0.0 ? std::int8_t{1} : std::int8_t{-1}; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

// Fisher-Yates shuffle driven by the stream above.
template <typename T>
void shuffle(std::vector<T>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace psl
