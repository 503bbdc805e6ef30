// Copyright 2026 The mixdenoise Authors.
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

#ifndef MIXDENOISE_RNG_HPP_
#define MIXDENOISE_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace mixdenoise {

// Seedable random stream with platform-independent output.
//
// The bit source is std::mt19937_64, whose output sequence is fixed by the
// C++ standard. The standard library distributions are NOT used because their
// algorithms are implementation-defined; every derived quantity below is
// computed here from raw 64-bit words:
//
//   uniform()          (word >> 11) * 2^-53, in [0, 1)
//   uniform_index(n)   rejection sampling, word % n after discarding the
//                      biased low range [0, 2^64 mod n)
//   poisson(mean)      Knuth's product-of-uniforms method
//   shuffle            Fisher-Yates from the back, j = uniform_index(i + 1)
//
// split() derives an independent child stream whose seed is a SplitMix64
// mix of (parent seed, label). Splitting does not consume parent state, so
// children can be derived in any order or concurrently.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  Rng split(std::uint64_t label) const;
  Rng split(std::string_view label) const;

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Requires 0 < mean <= kMaxPoissonMean.
  std::uint64_t poisson(double mean);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  static constexpr double kMaxPoissonMean = 500.0;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// 64-bit FNV-1a over the bytes of `data`.
std::uint64_t fnv1a64(std::string_view data) noexcept;

}  // namespace mixdenoise

#endif  // MIXDENOISE_RNG_HPP_
