// Copyright 2026 The cgm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based random streams. A draw is a pure function of
// (seed, stream, counter), so per-edge draws do not depend on generation
// order and sub-streams can be handed to parallel workers.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace cgm {

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  // Child stream; children of distinct (stream, index) pairs are distinct.
  constexpr RngSeed split(std::uint64_t index) const {
    return {seed, detail::mix64(stream ^ detail::mix64(index + 0x632be59bd9b4e019ULL))};
  }
  constexpr RngSeed split(std::string_view name) const { return split(detail::hash_name(name)); }

  constexpr std::uint64_t key() const {
    return detail::mix64(detail::mix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 1));
  }

  // The counter-th 64-bit word of this stream.
  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return detail::mix64(key() + detail::mix64(counter));
  }

  // Uniform double in [0, 1) for the counter-th draw.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  friend constexpr bool operator==(const RngSeed&, const RngSeed&) = default;
};

// Sequential engine over one stream. Satisfies UniformRandomBitGenerator.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  explicit CounterEngine(RngSeed seed) : key_(seed.key()) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return detail::mix64(key_ + detail::mix64(counter_++)); }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    for (;;) {
      const std::uint64_t x = (*this)();
      if (x < limit) return x % bound;
    }
  }

  // Standard normal via Box-Muller; stable across standard libraries.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  int binomial(int trials, double p) {
    int k = 0;
    for (int t = 0; t < trials; ++t) k += uniform() < p;
    return k;
  }

  // Fisher-Yates, portable across standard libraries.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cgm
