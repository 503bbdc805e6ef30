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


// Goodness-of-fit helpers for the statistical tests.

#ifndef MIXDENOISE_TESTS_STATS_HPP_
#define MIXDENOISE_TESTS_STATS_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace mixdenoise::testing {

// Pearson chi-square p-value of `observed` against expected probabilities.
inline double chi_square_p(const std::vector<std::size_t>& observed,
                           const std::vector<double>& probs) {
  double n = 0.0;
  for (const auto c : observed) n += static_cast<double>(c);
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * probs[i];
    const double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
  }
  const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline double chi_square_uniform_p(const std::vector<std::size_t>& observed) {
  return chi_square_p(observed,
                      std::vector<double>(observed.size(),
                                          1.0 / static_cast<double>(observed.size())));
}

}  // namespace mixdenoise::testing

#endif  // MIXDENOISE_TESTS_STATS_HPP_
