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

// End-to-end orchestration: configuration, batch emission, verification of
// emitted directories and sampling statistics.
//
// An emitted directory holds
//   batch-000000.jsonl ...  one TrainingRecord per line (see records.hpp)
//   vocab.json              the vocabulary used for encoding
//   manifest.json           config, config/vocab hashes, corpus sizes, mix
//                           plan, record and token counts per batch

#ifndef MIXDENOISE_PIPELINE_HPP_
#define MIXDENOISE_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixdenoise/corpus_io.hpp"
#include "mixdenoise/records.hpp"
#include "mixdenoise/sampler.hpp"
#include "mixdenoise/tokenizer.hpp"

namespace mixdenoise {

struct MonoSource {
  std::filesystem::path path;
  LanguageId lang;
};

struct BitextSource {
  std::filesystem::path path;
  Direction direction;
};

// Flat JSON config. Keys: languages, english, mono [{path, lang}],
// bitext [{path, src, tgt}], dictionary_dir, vocab, vocab_size, p_r,
// mask_ratio, span_lambda, permute_sentences, alpha_mono, alpha_bitext,
// alpha_task, halve_to_english, tasks, seed, max_len, token_budget, records,
// trace, max_pairs, reject_threshold, output. Relative paths resolve against
// the config file's directory. Unknown keys are rejected.
struct PipelineConfig {
  std::vector<MonoSource> mono;
  std::vector<BitextSource> bitext;
  std::optional<std::filesystem::path> dictionary_dir;
  std::optional<std::filesystem::path> vocab_path;
  std::size_t vocab_size = 8192;
  RecordConfig record;    // record.dict_noise.languages is the language set
  SamplerConfig sampler;
  std::size_t token_budget = 4096;
  std::size_t num_records = 1000;
  BitextLoadOptions bitext_options;
  std::filesystem::path output = "emitted";

  const std::vector<LanguageId>& languages() const {
    return record.dict_noise.languages;
  }

  void validate() const;

  static PipelineConfig from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir);
  // Paths are written as given (absolute after from_json). The output path
  // is left out when `with_output` is false.
  nlohmann::json to_json(bool with_output = true) const;
};

PipelineConfig load_config(const std::filesystem::path& path);

struct Corpora {
  std::vector<MonoShard> mono;      // shard id "mono/<i>"
  std::vector<BitextShard> bitext;  // shard id "bitext/<i>"
  Dictionary dictionary;
};

std::string mono_shard_id(std::size_t index);
std::string bitext_shard_id(std::size_t index);

// Loads shards concurrently (up to `jobs` threads). The dictionary is skipped
// when `with_dictionary` is false or no directory is configured.
Corpora load_corpora(const PipelineConfig& cfg, unsigned jobs,
                     bool with_dictionary = true);

// Reads cfg.vocab_path when that file exists, otherwise builds a vocabulary
// of cfg.vocab_size from the corpora.
Vocab resolve_vocab(const PipelineConfig& cfg, const Corpora& corpora);

Vocab build_vocab_for(const PipelineConfig& cfg, const Corpora& corpora);

struct EmitSummary {
  std::size_t records = 0;
  std::size_t tokens = 0;
  std::size_t batches = 0;
  std::map<Task, std::size_t> task_counts;
};

// Writes batches, vocab.json and manifest.json into `out_dir`. Refuses a
// non-empty directory unless `overwrite`, in which case only files this
// function writes are replaced.
EmitSummary emit(const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                 unsigned jobs, bool overwrite = false);

enum class CheckStatus { kPass, kFail, kSkip };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<std::size_t> first_violation;  // global record index
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* find(std::string_view name) const;
  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Re-checks an emitted directory against the corpora named in its manifest.
VerifyReport verify(const std::filesystem::path& dir, unsigned jobs);

// Mix plan, corpus manifest and UNK rates; with `empirical_draws` > 0 also
// Monte-Carlo frequencies from the draw stream and their TV distance to the
// plan.
nlohmann::json stats(const PipelineConfig& cfg, std::size_t empirical_draws,
                     unsigned jobs);

// Empirical frequencies of `draws` stream draws, keyed like MixPlan::to_json.
struct EmpiricalMix {
  std::size_t draws = 0;
  std::map<Task, std::size_t> tasks;
  std::map<std::string, std::size_t> mono;
  std::map<std::string, std::size_t> dict;
  std::map<std::string, std::size_t> bitext;
};

EmpiricalMix sample_mix(const MixPlan& plan, const CorpusManifest& manifest,
                        std::size_t draws, Rng rng);

// Total-variation distance between counts (normalized) and probabilities.
double total_variation(const std::map<std::string, std::size_t>& counts,
                       const std::map<std::string, double>& probs);

}  // namespace mixdenoise

#endif  // MIXDENOISE_PIPELINE_HPP_
