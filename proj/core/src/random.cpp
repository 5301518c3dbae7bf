#include "msl/random.hpp"

namespace msl {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  for (auto p : path) h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

Point uniform_on_sphere(int d, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Point v(static_cast<std::size_t>(d));
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (auto& x : v) {
      x = gauss(rng);
      n2 += x * x;
    }
  } while (n2 < 1e-300);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& x : v) x *= inv;
  return v;
}

Point uniform_in_ball(int k, Rng& rng) {
  if (k == 0) return {};
  Point v = uniform_on_sphere(k, rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = std::pow(unif(rng), 1.0 / k);
  for (auto& x : v) x *= r;
  return v;
}

}  // namespace msl
