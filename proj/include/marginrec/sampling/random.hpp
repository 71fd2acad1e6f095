#pragma once

#include "marginrec/core.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace marginrec {

// Seeded source built on std::mt19937_64, whose output sequence is fixed by
// the C++ standard. Distributions are implemented here rather than taken from
// <random>, whose distribution algorithms are implementation-defined.
class RandomSource {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/splitmix-fork v1";

  explicit RandomSource(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform on {0, ..., n-1} by rejection (no modulo bias).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw InvalidInput("uniform_index: empty range");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do v = next_u64();
    while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller, caching the second value.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do u1 = uniform01();
    while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Point normal_vector(Eigen::Index dim) {
    Point v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  // Uniform direction on the unit sphere of R^dim.
  Point unit_vector(Eigen::Index dim) {
    if (dim <= 0) throw InvalidInput("unit_vector: dimension must be positive");
    for (;;) {
      Point v = normal_vector(dim);
      const double len = v.norm();
      if (len > 1e-300) return v / len;
    }
  }

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::uint64_t j = uniform_index(i);
      std::swap(first[static_cast<std::ptrdiff_t>(i - 1)], first[static_cast<std::ptrdiff_t>(j)]);
    }
  }

  // Independent child stream; depends only on this source's seed and the label,
  // not on how many values were drawn so far.
  RandomSource fork(std::string_view label) const { return RandomSource(mix(seed_, fnv1a(label))); }
  RandomSource fork(std::uint64_t label) const { return RandomSource(mix(seed_, label ^ 0x9e3779b97f4a7c15ULL)); }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace marginrec
