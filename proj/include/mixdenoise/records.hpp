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

// Training record construction for the three objectives and token-budgeted
// batching.
//
//   MONO    source = g_phi(x)          target = x
//   DICT    source = g_phi(g_psi(x))   target = x
//   BITEXT  source = g_phi(x)          target = y   (y is never noised)
//
// Records serialize as one JSON object per line:
//
//   {"task": "dict", "src_lang": "en", "tgt_lang": "en",
//    "source_ids": [...], "target_ids": [...],
//    "provenance": [["mono/0", 17], ["mono/0", 18]],
//    "truncated": true,            // only when set
//    "source_truncated": true,     // only when set
//    "trace": {...}}               // only with tracing enabled

#ifndef MIXDENOISE_RECORDS_HPP_
#define MIXDENOISE_RECORDS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixdenoise/corpus_io.hpp"
#include "mixdenoise/noising.hpp"
#include "mixdenoise/rng.hpp"
#include "mixdenoise/sampler.hpp"
#include "mixdenoise/tokenizer.hpp"

namespace mixdenoise {

struct RecordConfig {
  NoiseConfig noise;
  DictNoiseConfig dict_noise;
  std::size_t max_len = 256;
  bool trace = false;

  void validate() const;
};

// A corpus line: shard id ("mono/3", "bitext/0") and 0-based sentence index
// within that shard after blank-line removal.
struct SourceLine {
  std::string shard;
  std::size_t line;

  friend bool operator==(const SourceLine&, const SourceLine&) = default;
};

struct MaskTrace {
  std::size_t length = 0;
  std::size_t masked = 0;
  std::vector<Span> spans;

  friend bool operator==(const MaskTrace&, const MaskTrace&) = default;
};

// Noise events of one record. Replacement positions index the clean words of
// the record flattened in provenance order; mask spans index the sequence fed
// to span masking (one MaskTrace per masked unit: the whole window for
// MONO/DICT, each packed segment for BITEXT).
struct NoiseTrace {
  std::vector<std::size_t> order;
  std::vector<MaskTrace> masks;
  std::vector<Replacement> replacements;
  std::size_t dict_words = 0;
  std::size_t language_draws = 0;

  friend bool operator==(const NoiseTrace&, const NoiseTrace&) = default;
};

struct TrainingRecord {
  Task task;
  TokenSeq source;
  TokenSeq target;
  std::vector<SourceLine> provenance;
  // The clean text was cut to fit max_len.
  bool truncated = false;
  // The noised source was cut to fit max_len.
  bool source_truncated = false;
  std::optional<NoiseTrace> trace;

  const LanguageId& src_lang() const noexcept { return source.lang; }
  const LanguageId& tgt_lang() const noexcept { return target.lang; }
  std::size_t token_count() const noexcept {
    return source.ids.size() + target.ids.size();
  }

  friend bool operator==(const TrainingRecord&, const TrainingRecord&) = default;
};

std::string record_to_json(const TrainingRecord& record);
TrainingRecord record_from_json(std::string_view line);

// Consecutive sentences of one shard, at most max_len - 2 words in total.
struct SentenceWindow {
  LanguageId lang;
  std::vector<Words> sentences;
  std::vector<SourceLine> provenance;
  bool truncated = false;
};

// Starts at `start` and appends following sentences of the same shard while
// the framed target fits. A first sentence longer than the budget is cut at
// the budget and flagged.
SentenceWindow build_window(const LanguageId& lang, const std::string& shard,
                            std::span<const Words> sentences, std::size_t start,
                            std::size_t max_len);

// Multi-segment framing. Source: s1 EOS s2 EOS ... sk TAG EOS.
// Target: TAG t1 EOS t2 EOS ... tk EOS. With one segment this equals encode().
TokenSeq encode_segments(std::span<const Words> segments, const LanguageId& lang,
                         const Vocab& vocab, Framing framing);

// Number of EOS-terminated segments in a framed sequence.
std::size_t segment_count(const TokenSeq& seq);

TrainingRecord make_mono_record(const SentenceWindow& window, const Vocab& vocab,
                                const RecordConfig& cfg, Rng& rng);

// Dictionary noise draws from rng.split("dict") and g_phi from
// rng.split("phi"), so the two stages never shift each other's randomness.
TrainingRecord make_dict_record(const SentenceWindow& window,
                                const Dictionary& dict, const Vocab& vocab,
                                const RecordConfig& cfg, Rng& rng);

struct WordPair {
  Direction direction;
  Words source;
  Words target;
  SourceLine origin;
};

struct PackedPair {
  Direction direction;
  std::vector<Words> source_segments;
  std::vector<Words> target_segments;
  std::vector<SourceLine> provenance;
  bool truncated = false;
};

// Cuts both sides of a single over-long pair by the same factor so the longer
// side fills max_len - 2 words. Returns false when nothing was cut.
bool truncate_pair(Words& source, Words& target, std::size_t max_len);

// Greedy accumulator for one packed record. Both sides must stay within
// max_len once framed: sum of segment lengths + one EOS per segment + tag.
class BitextPacker {
 public:
  BitextPacker(Direction direction, std::size_t max_len);

  // The first pair is always accepted (cut by truncate_pair if needed).
  // Later pairs are accepted only if both sides still fit. Throws DataError
  // for a pair of another direction.
  bool try_add(const WordPair& pair);

  bool empty() const noexcept { return packed_.source_segments.empty(); }
  PackedPair finish();

 private:
  std::size_t max_len_;
  std::size_t source_tokens_ = 1;  // language tag
  std::size_t target_tokens_ = 1;
  PackedPair packed_;
};

// Shuffles `pairs` with rng and greedily packs them in that order.
// Throws DataError when the pairs do not share one direction.
std::vector<PackedPair> pack_bitext(std::span<const WordPair> pairs,
                                    std::size_t max_len, Rng& rng);

// Each source segment is noised on its own with g_phi; the target segments
// are encoded clean.
TrainingRecord make_bitext_record(const PackedPair& packed, const Vocab& vocab,
                                  const RecordConfig& cfg, Rng& rng);

struct Batch {
  std::vector<TrainingRecord> records;
  std::size_t token_count = 0;
};

// Greedy, order-preserving token-budget batching.
class BatchAssembler {
 public:
  explicit BatchAssembler(std::size_t token_budget);

  // Returns the previous batch when `record` does not fit in it. Throws
  // DataError when a single record exceeds the budget.
  std::optional<Batch> push(TrainingRecord record);
  std::optional<Batch> flush();

 private:
  std::size_t budget_;
  Batch current_;
};

std::vector<Batch> assemble_batches(std::vector<TrainingRecord> records,
                                    std::size_t token_budget);

}  // namespace mixdenoise

#endif  // MIXDENOISE_RECORDS_HPP_
