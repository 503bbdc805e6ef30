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

// Exponential (temperature) sampling over languages, translation directions
// and tasks, and the seeded draw stream built on top of it.

#ifndef MIXDENOISE_SAMPLER_HPP_
#define MIXDENOISE_SAMPLER_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mixdenoise/corpus_io.hpp"
#include "mixdenoise/error.hpp"
#include "mixdenoise/language.hpp"
#include "mixdenoise/rng.hpp"

namespace mixdenoise {

enum class Task { kMono, kDict, kBitext };

inline constexpr Task kAllTasks[] = {Task::kMono, Task::kDict, Task::kBitext};

std::string_view to_string(Task task);
// Accepts "mono", "dict", "bitext". Throws ConfigError otherwise.
Task parse_task(std::string_view name);

struct SamplerConfig {
  double alpha_mono = 0.5;
  double alpha_bitext = 0.3;
  double alpha_task = 0.3;
  bool halve_to_english = true;
  LanguageId english{"en"};
  std::uint64_t seed = 0;
  // Tasks allowed in the mix; excluded tasks get probability 0.
  std::vector<Task> tasks{Task::kMono, Task::kDict, Task::kBitext};

  void validate() const;
  bool allows(Task task) const;
};

// q_i = s_i^alpha / sum_j s_j^alpha.
//
// Sizes are divided by their gcd before exponentiation, so scaling every size
// by a common integer factor yields bit-identical probabilities. Zero sizes
// get probability 0; all-zero input throws DataError.
template <typename Key, typename Compare>
std::map<Key, double, Compare> exponential_weights(
    const std::map<Key, std::uint64_t, Compare>& sizes, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("sampling exponent must be finite and >= 0");
  }
  std::uint64_t g = 0;
  for (const auto& [key, size] : sizes) g = std::gcd(g, size);
  if (g == 0) throw DataError("exponential sampling over all-zero sizes");

  std::map<Key, double, Compare> out;
  double total = 0.0;
  for (const auto& [key, size] : sizes) {
    const double w =
        size == 0 ? 0.0 : std::pow(static_cast<double>(size / g), alpha);
    out.emplace(key, w);
    total += w;
  }
  for (auto& [key, p] : out) p /= total;
  return out;
}

// Exponential weights with alpha_bitext; then, if enabled, every direction
// into cfg.english is halved and the whole distribution renormalized once.
std::map<Direction, double> direction_weights(
    const std::map<Direction, std::uint64_t>& bitext_sizes,
    const SamplerConfig& cfg);

// Exponential weights with alpha_task over task volumes. mono and dict both
// consume monolingual data, so each has volume = total mono sentences;
// bitext has volume = total pairs.
std::map<Task, double> task_weights(const CorpusManifest& manifest,
                                    const SamplerConfig& cfg);

struct MixPlan {
  SamplerConfig config;
  std::map<LanguageId, double> mono_probs;
  std::map<LanguageId, double> dict_probs;
  std::map<Direction, double> bitext_probs;  // empty without bitext
  std::map<Task, double> task_probs;         // always holds all three tasks

  std::string to_json() const;
  static MixPlan from_json(std::string_view text);
};

MixPlan build_mix_plan(const CorpusManifest& manifest, const SamplerConfig& cfg);

// Cycles through a fresh seeded permutation of [0, n) per epoch.
class EpochCursor {
 public:
  EpochCursor(std::size_t n, Rng rng);

  std::size_t peek();
  void advance();
  std::size_t next() {
    const std::size_t v = peek();
    advance();
    return v;
  }
  std::size_t size() const noexcept { return n_; }
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  void refill();

  std::size_t n_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  std::size_t epoch_ = 0;
};

using Bucket = std::variant<LanguageId, Direction>;

std::string bucket_key(const Bucket& bucket);

struct Draw {
  Task task;
  Bucket bucket;
  std::size_t item;  // index into the bucket's concatenated shards
};

// Each draw picks a task from task_probs, then a language (mono/dict) or a
// direction (bitext), then the next item of that bucket's epoch cursor.
// Buckets of one task are independent of the same buckets under another.
class SampleStream {
 public:
  // Throws DataError if the plan puts mass on a bucket the manifest lacks.
  SampleStream(const MixPlan& plan, const CorpusManifest& manifest, Rng rng);

  Draw next();
  EpochCursor& cursor(Task task, const Bucket& bucket);

 private:
  struct Table {
    std::vector<Bucket> buckets;
    std::vector<double> cumulative;
  };
  const Table& table(Task task) const;

  Rng rng_;
  std::uint64_t cursor_seed_;
  std::vector<Task> tasks_;
  std::vector<double> task_cumulative_;
  Table mono_;
  Table dict_;
  Table bitext_;
  std::map<Bucket, std::uint64_t> sizes_;
  std::map<std::pair<Task, Bucket>, EpochCursor> cursors_;
};

// Index i with probability proportional to cumulative[i] - cumulative[i-1].
std::size_t sample_categorical(const std::vector<double>& cumulative, Rng& rng);

}  // namespace mixdenoise

#endif  // MIXDENOISE_SAMPLER_HPP_
