#include "atm/rng.hpp"

namespace atm {

std::size_t Rng::uniform_index(std::size_t n) {
  if (n <= 1) return 0;
  auto k = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  return k < n ? k : n - 1;
}

std::uint64_t splitmix64_mix(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64_mix(base + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

}  // namespace atm
