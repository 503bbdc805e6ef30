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

#include "mixdenoise/sampler.hpp"

#include <algorithm>

#include "json.hpp"

namespace mixdenoise {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kMono: return "mono";
    case Task::kDict: return "dict";
    case Task::kBitext: return "bitext";
  }
  return "?";
}

Task parse_task(std::string_view name) {
  for (const Task t : kAllTasks) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError("unknown task '" + std::string(name) +
                    "' (expected mono, dict or bitext)");
}

void SamplerConfig::validate() const {
  for (const double a : {alpha_mono, alpha_bitext, alpha_task}) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ConfigError("sampling exponents must be finite and >= 0");
    }
  }
  if (tasks.empty()) throw ConfigError("at least one task must be enabled");
}

bool SamplerConfig::allows(Task task) const {
  return std::find(tasks.begin(), tasks.end(), task) != tasks.end();
}

std::map<Direction, double> direction_weights(
    const std::map<Direction, std::uint64_t>& bitext_sizes,
    const SamplerConfig& cfg) {
  if (bitext_sizes.empty()) throw DataError("no bitext directions to weight");
  auto probs = exponential_weights(bitext_sizes, cfg.alpha_bitext);
  if (!cfg.halve_to_english) return probs;
  double total = 0.0;
  for (auto& [dir, p] : probs) {
    if (dir.tgt == cfg.english) p *= 0.5;
    total += p;
  }
  for (auto& [dir, p] : probs) p /= total;
  return probs;
}

std::map<Task, double> task_weights(const CorpusManifest& manifest,
                                    const SamplerConfig& cfg) {
  const std::uint64_t mono = manifest.total_mono();
  if (mono == 0) throw DataError("task sampling needs monolingual data");
  const std::uint64_t bitext = manifest.total_bitext();
  std::map<Task, std::uint64_t> volumes{
      {Task::kMono, cfg.allows(Task::kMono) ? mono : 0},
      {Task::kDict, cfg.allows(Task::kDict) ? mono : 0},
      {Task::kBitext, cfg.allows(Task::kBitext) ? bitext : 0},
  };
  return exponential_weights(volumes, cfg.alpha_task);
}

MixPlan build_mix_plan(const CorpusManifest& manifest, const SamplerConfig& cfg) {
  cfg.validate();
  MixPlan plan;
  plan.config = cfg;
  plan.mono_probs = exponential_weights(manifest.mono_sizes, cfg.alpha_mono);
  plan.dict_probs = plan.mono_probs;
  if (!manifest.bitext_sizes.empty() && manifest.total_bitext() > 0) {
    plan.bitext_probs = direction_weights(manifest.bitext_sizes, cfg);
  }
  plan.task_probs = task_weights(manifest, cfg);
  return plan;
}

std::string MixPlan::to_json() const {
  nlohmann::json j;
  j["alpha_mono"] = config.alpha_mono;
  j["alpha_bitext"] = config.alpha_bitext;
  j["alpha_task"] = config.alpha_task;
  j["halve_to_english"] = config.halve_to_english;
  j["english"] = config.english.code();
  j["tasks"] = nlohmann::json::array();
  for (const Task t : config.tasks) j["tasks"].push_back(to_string(t));
  j["mono_probs"] = nlohmann::json::object();
  j["dict_probs"] = nlohmann::json::object();
  j["bitext_probs"] = nlohmann::json::object();
  j["task_probs"] = nlohmann::json::object();
  for (const auto& [l, p] : mono_probs) j["mono_probs"][l.code()] = p;
  for (const auto& [l, p] : dict_probs) j["dict_probs"][l.code()] = p;
  for (const auto& [d, p] : bitext_probs) j["bitext_probs"][d.key()] = p;
  for (const auto& [t, p] : task_probs) {
    j["task_probs"][std::string(to_string(t))] = p;
  }
  return j.dump(2) + "\n";
}

MixPlan MixPlan::from_json(std::string_view text) {
  MixPlan plan;
  try {
    const auto j = nlohmann::json::parse(text);
    plan.config.alpha_mono = j.at("alpha_mono").get<double>();
    plan.config.alpha_bitext = j.at("alpha_bitext").get<double>();
    plan.config.alpha_task = j.at("alpha_task").get<double>();
    plan.config.halve_to_english = j.at("halve_to_english").get<bool>();
    plan.config.english = LanguageId(j.at("english").get<std::string>());
    plan.config.tasks.clear();
    for (const auto& t : j.at("tasks")) {
      plan.config.tasks.push_back(parse_task(t.get<std::string>()));
    }
    for (const auto& [k, v] : j.at("mono_probs").items()) {
      plan.mono_probs.emplace(LanguageId(k), v.get<double>());
    }
    for (const auto& [k, v] : j.at("dict_probs").items()) {
      plan.dict_probs.emplace(LanguageId(k), v.get<double>());
    }
    for (const auto& [k, v] : j.at("bitext_probs").items()) {
      plan.bitext_probs.emplace(Direction::parse(k), v.get<double>());
    }
    for (const auto& [k, v] : j.at("task_probs").items()) {
      plan.task_probs.emplace(parse_task(k), v.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed mix plan: ") + e.what());
  }
  return plan;
}

EpochCursor::EpochCursor(std::size_t n, Rng rng) : n_(n), rng_(rng) {
  if (n == 0) throw DataError("epoch cursor over an empty bucket");
}

void EpochCursor::refill() {
  order_.resize(n_);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  rng_.shuffle(std::span(order_));
  pos_ = 0;
  ++epoch_;
}

std::size_t EpochCursor::peek() {
  if (pos_ == order_.size()) refill();
  return order_[pos_];
}

void EpochCursor::advance() {
  if (pos_ == order_.size()) refill();
  ++pos_;
}

std::string bucket_key(const Bucket& bucket) {
  if (const auto* lang = std::get_if<LanguageId>(&bucket)) return lang->code();
  return std::get<Direction>(bucket).key();
}

std::size_t sample_categorical(const std::vector<double>& cumulative, Rng& rng) {
  if (cumulative.empty() || !(cumulative.back() > 0.0)) {
    throw DataError("sampling from an empty distribution");
  }
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(idx, cumulative.size() - 1);
}

namespace {

template <typename Key>
void fill_table(const std::map<Key, double>& probs, std::vector<Bucket>& buckets,
                std::vector<double>& cumulative) {
  double acc = 0.0;
  for (const auto& [key, p] : probs) {
    if (p <= 0.0) continue;
    acc += p;
    buckets.emplace_back(key);
    cumulative.push_back(acc);
  }
}

}  // namespace

SampleStream::SampleStream(const MixPlan& plan, const CorpusManifest& manifest,
                           Rng rng)
    : rng_(rng.split("draws")), cursor_seed_(rng.split("cursors").seed()) {
  double acc = 0.0;
  for (const auto& [task, p] : plan.task_probs) {
    if (p <= 0.0) continue;
    acc += p;
    tasks_.push_back(task);
    task_cumulative_.push_back(acc);
  }
  if (tasks_.empty()) throw DataError("mix plan has no task with mass");
  fill_table(plan.mono_probs, mono_.buckets, mono_.cumulative);
  fill_table(plan.dict_probs, dict_.buckets, dict_.cumulative);
  fill_table(plan.bitext_probs, bitext_.buckets, bitext_.cumulative);

  for (const auto& [lang, n] : manifest.mono_sizes) sizes_.emplace(lang, n);
  for (const auto& [dir, n] : manifest.bitext_sizes) sizes_.emplace(dir, n);
  for (const Task task : tasks_) {
    const Table& t = table(task);
    if (t.buckets.empty()) {
      throw DataError("task '" + std::string(to_string(task)) +
                      "' has mass but no buckets");
    }
    for (const Bucket& b : t.buckets) {
      const auto it = sizes_.find(b);
      if (it == sizes_.end() || it->second == 0) {
        throw DataError("bucket '" + bucket_key(b) +
                        "' referenced by the plan is empty");
      }
    }
  }
}

const SampleStream::Table& SampleStream::table(Task task) const {
  switch (task) {
    case Task::kMono: return mono_;
    case Task::kDict: return dict_;
    case Task::kBitext: return bitext_;
  }
  return mono_;
}

EpochCursor& SampleStream::cursor(Task task, const Bucket& bucket) {
  auto key = std::make_pair(task, bucket);
  auto it = cursors_.find(key);
  if (it == cursors_.end()) {
    const auto size = sizes_.find(bucket);
    if (size == sizes_.end() || size->second == 0) {
      throw DataError("bucket '" + bucket_key(bucket) + "' is empty");
    }
    const std::string label =
        std::string(to_string(task)) + "/" + bucket_key(bucket);
    it = cursors_
             .emplace(std::move(key),
                      EpochCursor(static_cast<std::size_t>(size->second),
                                  Rng(cursor_seed_).split(label)))
             .first;
  }
  return it->second;
}

Draw SampleStream::next() {
  const Task task = tasks_[sample_categorical(task_cumulative_, rng_)];
  const Table& t = table(task);
  const Bucket& bucket = t.buckets[sample_categorical(t.cumulative, rng_)];
  return Draw{task, bucket, cursor(task, bucket).next()};
}

}  // namespace mixdenoise
