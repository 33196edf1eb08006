#include "bsaomp/rng.hpp"

#include <cmath>

namespace bsaomp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = splitmix64(master);
  for (auto c : counters) {
    h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  }
  return h;
}

Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> counters) {
  return Rng(derive_seed(master, counters));
}

cplx complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * variance));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

}  // namespace bsaomp
