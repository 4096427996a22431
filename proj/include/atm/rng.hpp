#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace atm {

// Every random draw in the library goes through this wrapper so that a run is
// reproducible from its seed. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard. Doubles take the top 53 bits of one
// engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1). Consumes one engine output.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). Consumes one engine output when n > 1 and none otherwise.
  std::size_t uniform_index(std::size_t n);

  // Fisher-Yates, walking from the back.
  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 output function: a bijection on 64-bit words.
std::uint64_t splitmix64_mix(std::uint64_t x);

// Seed of stream `index` under `base`: the (index+1)-th output of a SplitMix64
// generator started at state `base`. Injective in `index`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace atm
