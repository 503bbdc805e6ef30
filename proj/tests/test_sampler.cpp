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


#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "mixdenoise/error.hpp"
#include "mixdenoise/pipeline.hpp"
#include "mixdenoise/sampler.hpp"

using namespace mixdenoise;

namespace {

const LanguageId en("en");
const LanguageId fr("fr");
const LanguageId es("es");
const LanguageId de("de");

template <typename M>
double total(const M& m) {
  double s = 0.0;
  for (const auto& [k, p] : m) s += p;
  return s;
}

CorpusManifest four_directions(std::uint64_t n) {
  CorpusManifest m;
  m.mono_sizes = {{en, 100}, {fr, 100}, {es, 100}};
  m.bitext_sizes = {{Direction(en, fr), n}, {Direction(fr, en), n},
                    {Direction(en, es), n}, {Direction(es, en), n}};
  return m;
}

}  // namespace

TEST_CASE("equal sizes give a uniform distribution for any exponent") {
  const std::map<std::string, std::uint64_t> sizes{{"a", 7}, {"b", 7}, {"c", 7}};
  for (const double alpha : {0.0, 0.3, 0.5, 1.0, 2.0}) {
    for (const auto& [k, p] : exponential_weights(sizes, alpha)) {
      CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("square-root sampling of 100 and 1") {
  const std::map<std::string, std::uint64_t> sizes{{"A", 100}, {"B", 1}};
  const auto p = exponential_weights(sizes, 0.5);
  // Oracle: sqrt(100) = 10 and sqrt(1) = 1.
  const double a = std::sqrt(100.0) / (std::sqrt(100.0) + std::sqrt(1.0));
  CHECK(p.at("A") == doctest::Approx(a).epsilon(1e-12));
  CHECK(p.at("A") == doctest::Approx(0.9090909090909091).epsilon(1e-12));
  CHECK(p.at("B") == doctest::Approx(0.0909090909090909).epsilon(1e-12));
}

TEST_CASE("exponent zero is uniform over non-empty keys") {
  const std::map<std::string, std::uint64_t> sizes{{"a", 1}, {"b", 1000}, {"z", 0}};
  const auto p = exponential_weights(sizes, 0.0);
  CHECK(p.at("a") == doctest::Approx(0.5));
  CHECK(p.at("b") == doctest::Approx(0.5));
  CHECK(p.at("z") == 0.0);
}

TEST_CASE("exponential weights reject bad input") {
  const std::map<std::string, std::uint64_t> zeros{{"a", 0}, {"b", 0}};
  CHECK_THROWS_AS(exponential_weights(zeros, 0.5), DataError);
  const std::map<std::string, std::uint64_t> ok{{"a", 1}};
  CHECK_THROWS_AS(exponential_weights(ok, -1.0), ConfigError);
  CHECK_THROWS_AS(exponential_weights(ok, NAN), ConfigError);
}

TEST_CASE("halving to-English directions of four equal directions") {
  SamplerConfig cfg;
  const auto m = four_directions(500);
  for (const double alpha : {0.0, 0.3, 1.0}) {
    cfg.alpha_bitext = alpha;
    const auto p = direction_weights(m.bitext_sizes, cfg);
    // Oracle: 0.25 / 0.75 and 0.125 / 0.75.
    CHECK(p.at(Direction(en, fr)) == doctest::Approx(0.25 / 0.75).epsilon(1e-12));
    CHECK(p.at(Direction(fr, en)) == doctest::Approx(0.125 / 0.75).epsilon(1e-12));
    CHECK(p.at(Direction(en, es)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(p.at(Direction(es, en)) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }
  cfg.halve_to_english = false;
  CHECK(direction_weights(m.bitext_sizes, cfg) ==
        exponential_weights(m.bitext_sizes, cfg.alpha_bitext));
  const std::map<Direction, std::uint64_t> single{{Direction(fr, en), 10}};
  CHECK(direction_weights(single, SamplerConfig{}).at(Direction(fr, en)) == 1.0);
}

TEST_CASE("halving applies to probabilities, not sizes") {
  // Sizes 1000 (en->fr) and 10 (fr->en), alpha 0.5: sqrt weights 31.62 and
  // 3.162, then halve fr->en once.
  const std::map<Direction, std::uint64_t> sizes{{Direction(en, fr), 1000},
                                                 {Direction(fr, en), 10}};
  const auto p = direction_weights(sizes, SamplerConfig{0.5, 0.5});
  const double a = std::sqrt(1000.0);
  const double b = 0.5 * std::sqrt(10.0);
  CHECK(p.at(Direction(fr, en)) == doctest::Approx(b / (a + b)).epsilon(1e-12));
}

TEST_CASE("halving keeps ratios among non-English-target directions") {
  std::map<Direction, std::uint64_t> sizes{{Direction(en, fr), 900},
                                           {Direction(en, de), 100},
                                           {Direction(fr, de), 40},
                                           {Direction(de, en), 5000}};
  SamplerConfig cfg;
  const auto on = direction_weights(sizes, cfg);
  cfg.halve_to_english = false;
  const auto off = direction_weights(sizes, cfg);
  const Direction a(en, fr), b(en, de), c(fr, de);
  CHECK(on.at(a) / on.at(b) == doctest::Approx(off.at(a) / off.at(b)).epsilon(1e-12));
  CHECK(on.at(b) / on.at(c) == doctest::Approx(off.at(b) / off.at(c)).epsilon(1e-12));
  CHECK(on.at(Direction(de, en)) < off.at(Direction(de, en)));
}

TEST_CASE("task weights over data volumes") {
  SamplerConfig cfg;
  CorpusManifest m;
  m.mono_sizes = {{en, 600}, {fr, 400}};
  m.bitext_sizes = {{Direction(en, fr), 1000}};
  for (const auto& [t, p] : task_weights(m, cfg)) {
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }

  m.mono_sizes = {{en, 1000000}};
  m.bitext_sizes = {{Direction(en, fr), 10000}};
  const auto p = task_weights(m, cfg);
  // Oracle: 10^1.8 : 10^1.8 : 10^1.2, normalized.
  const double big = std::pow(10.0, 1.8);
  const double small = std::pow(10.0, 1.2);
  const double mono = big / (2 * big + small);
  CHECK(p.at(Task::kMono) == doctest::Approx(mono).epsilon(1e-12));
  CHECK(p.at(Task::kDict) == doctest::Approx(mono).epsilon(1e-12));
  CHECK(p.at(Task::kMono) == doctest::Approx(0.4442097747083131).epsilon(1e-12));
  CHECK(p.at(Task::kBitext) == doctest::Approx(0.11158045058337392).epsilon(1e-12));

  m.bitext_sizes.clear();
  const auto no_bitext = task_weights(m, cfg);
  CHECK(no_bitext.at(Task::kBitext) == 0.0);
  CHECK(no_bitext.at(Task::kMono) == doctest::Approx(0.5));
}

TEST_CASE("disabled tasks get zero mass") {
  SamplerConfig cfg;
  cfg.tasks = {Task::kMono};
  const auto plan = build_mix_plan(four_directions(10), cfg);
  CHECK(plan.task_probs.at(Task::kMono) == 1.0);
  CHECK(plan.task_probs.at(Task::kDict) == 0.0);
  CHECK(plan.task_probs.at(Task::kBitext) == 0.0);
  SampleStream stream(plan, four_directions(10), Rng(3));
  for (int i = 0; i < 1000; ++i) CHECK(stream.next().task == Task::kMono);
  cfg.tasks.clear();
  CHECK_THROWS_AS(build_mix_plan(four_directions(10), cfg), ConfigError);
}

TEST_CASE("mix plan invariants") {
  CorpusManifest m;
  m.mono_sizes = {{en, 5}};
  const SamplerConfig defaults;
  const auto single = build_mix_plan(m, defaults);
  CHECK(single.mono_probs.at(en) == 1.0);
  CHECK(single.bitext_probs.empty());
  CHECK(single.task_probs.at(Task::kBitext) == 0.0);
  CHECK(single.task_probs.size() == 3);

  const auto plan = build_mix_plan(four_directions(77), defaults);
  CHECK(std::abs(total(plan.mono_probs) - 1.0) < 1e-9);
  CHECK(std::abs(total(plan.bitext_probs) - 1.0) < 1e-9);
  CHECK(std::abs(total(plan.task_probs) - 1.0) < 1e-9);
  CHECK(plan.dict_probs == plan.mono_probs);
  const std::string text = plan.to_json();
  CHECK(text.find("\"alpha_mono\": 0.5") != std::string::npos);
  CHECK(text.find("\"alpha_bitext\": 0.3") != std::string::npos);
  CHECK(text.find("\"alpha_task\": 0.3") != std::string::npos);
  CHECK(MixPlan::from_json(text).to_json() == text);
}

TEST_CASE("scaling every size leaves the plan bytes unchanged") {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    CorpusManifest m;
    const std::vector<LanguageId> langs{en, fr, es, de};
    for (const auto& l : langs) m.mono_sizes[l] = 1 + rng.uniform_index(100000);
    m.bitext_sizes[Direction(en, fr)] = 1 + rng.uniform_index(5000);
    m.bitext_sizes[Direction(de, en)] = 1 + rng.uniform_index(5000);
    const std::uint64_t c = 2 + rng.uniform_index(1000);
    CorpusManifest scaled = m;
    for (auto& [k, v] : scaled.mono_sizes) v *= c;
    for (auto& [k, v] : scaled.bitext_sizes) v *= c;
    REQUIRE(build_mix_plan(scaled, SamplerConfig{}).to_json() ==
            build_mix_plan(m, SamplerConfig{}).to_json());
  }
}

TEST_CASE("growing a bucket never lowers its probability") {
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    std::map<std::string, std::uint64_t> sizes;
    for (const char* k : {"a", "b", "c", "d"}) sizes[k] = 1 + rng.uniform_index(1000);
    const double before = exponential_weights(sizes, 0.3).at("b");
    sizes["b"] += 1 + rng.uniform_index(1000);
    REQUIRE(exponential_weights(sizes, 0.3).at("b") >= before);
  }
}

TEST_CASE("epoch cursor visits every item once per epoch") {
  EpochCursor cursor(50, Rng(4));
  for (int epoch = 0; epoch < 3; ++epoch) {
    std::set<std::size_t> seen;
    for (int i = 0; i < 50; ++i) seen.insert(cursor.next());
    CHECK(seen.size() == 50);
  }
  CHECK(cursor.peek() == cursor.peek());
  CHECK_THROWS_AS(EpochCursor(0, Rng(1)), DataError);
}

TEST_CASE("every item is drawn within two bucket-sizes of draws") {
  CorpusManifest m;
  m.mono_sizes = {{en, 37}, {fr, 11}};
  SamplerConfig cfg;
  cfg.tasks = {Task::kMono};
  SampleStream stream(build_mix_plan(m, cfg), m, Rng(6));
  std::map<std::string, std::vector<std::size_t>> per_bucket;
  for (int i = 0; i < 5000; ++i) {
    const Draw d = stream.next();
    per_bucket[bucket_key(d.bucket)].push_back(d.item);
  }
  for (const auto& [key, items] : per_bucket) {
    const std::size_t n = key == "en" ? 37 : 11;
    for (std::size_t start = 0; start + 2 * n <= items.size(); start += n) {
      std::set<std::size_t> window(items.begin() + start,
                                   items.begin() + start + 2 * n);
      REQUIRE(window.size() == n);
    }
  }
}

TEST_CASE("the same seed gives the same draw sequence") {
  const auto m = four_directions(30);
  const auto plan = build_mix_plan(m, SamplerConfig{});
  SampleStream a(plan, m, Rng(9));
  SampleStream b(plan, m, Rng(9));
  SampleStream c(plan, m, Rng(10));
  bool differs = false;
  for (int i = 0; i < 2000; ++i) {
    const Draw x = a.next();
    const Draw y = b.next();
    const Draw z = c.next();
    REQUIRE(x.task == y.task);
    REQUIRE(x.bucket == y.bucket);
    REQUIRE(x.item == y.item);
    differs = differs || x.item != z.item || x.bucket != z.bucket;
  }
  CHECK(differs);
}

TEST_CASE("four-direction draws match the analytic frequencies") {
  const auto m = four_directions(40);
  SamplerConfig cfg;
  cfg.tasks = {Task::kBitext};
  const auto plan = build_mix_plan(m, cfg);
  const auto mix = sample_mix(plan, m, 100000, Rng(1));
  const std::map<std::string, double> analytic{
      {"en-fr", 1.0 / 3.0}, {"fr-en", 1.0 / 6.0}, {"en-es", 1.0 / 3.0},
      {"es-en", 1.0 / 6.0}};
  CHECK(total_variation(mix.bitext, analytic) < 0.01);
}

TEST_CASE("a plan bucket missing from the data is an error") {
  const auto m = four_directions(40);
  auto plan = build_mix_plan(m, SamplerConfig{});
  plan.mono_probs[de] = 0.1;
  CHECK_THROWS_AS(SampleStream(plan, m, Rng(1)), DataError);
}

TEST_CASE("total variation distance") {
  const std::map<std::string, std::size_t> counts{{"a", 3}, {"b", 1}};
  CHECK(total_variation(counts, {{"a", 0.75}, {"b", 0.25}}) == 0.0);
  CHECK(total_variation(counts, {{"a", 0.25}, {"c", 0.75}}) == doctest::Approx(0.75));
  CHECK(total_variation(counts, {{"a", 0.5}, {"b", 0.5}}) == doctest::Approx(0.25));
}
