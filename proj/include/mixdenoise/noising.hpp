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

// Noising functions applied to word sequences before id encoding:
//
//  * dictionary_noise: per-word code-switching through a bilingual
//    dictionary into a uniformly chosen other language.
//  * apply_g_phi: sentence permutation followed by Poisson span masking,
//    the BART/mBART corruption.
//
// Every function is pure given (input, config, rng state).

#ifndef MIXDENOISE_NOISING_HPP_
#define MIXDENOISE_NOISING_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mixdenoise/corpus_io.hpp"
#include "mixdenoise/language.hpp"
#include "mixdenoise/rng.hpp"
#include "mixdenoise/tokenizer.hpp"

namespace mixdenoise {

struct DictNoiseConfig {
  // Total replacement probability per word.
  double p_r = 0.4;
  // Candidate replacement languages. The sentence's own language is removed
  // per call, and each remaining language gets p_r / |remaining|.
  std::vector<LanguageId> languages;

  void validate() const;
};

struct NoiseConfig {
  double mask_ratio = 0.35;
  double span_lambda = 3.5;
  bool permute_sentences = true;

  void validate() const;
};

struct Replacement {
  std::size_t position;      // index in the input word list
  LanguageId lang;
  std::string translation;   // dictionary entry as stored
  std::size_t output_start;  // index of the first spliced word in the output
  std::size_t output_length;

  friend bool operator==(const Replacement&, const Replacement&) = default;
};

struct DictNoiseResult {
  Words words;
  std::vector<Replacement> replacements;
  // Words for which some language was drawn, whether or not an entry existed.
  std::size_t language_draws = 0;
};

// Languages a sentence in `lang` may be switched into, in config order.
std::vector<LanguageId> replacement_languages(const DictNoiseConfig& cfg,
                                              const LanguageId& lang);

DictNoiseResult dictionary_noise(std::span<const std::string> words,
                                 const LanguageId& lang, const Dictionary& dict,
                                 const DictNoiseConfig& cfg, Rng& rng);

struct Span {
  std::size_t start;
  std::size_t length;

  friend bool operator==(const Span&, const Span&) = default;
};

struct MaskResult {
  Words words;
  std::vector<Span> spans;  // sorted by start, pairwise disjoint
  std::size_t masked = 0;   // input words covered by spans
  std::size_t input_length = 0;
};

// Number of words to mask: ceil(ratio * n), clamped to n.
std::size_t mask_target(std::size_t n, double ratio);

// Replaces each span by a single kMaskToken word. Spans must be disjoint and
// in range; throws DataError otherwise.
Words apply_spans(std::span<const std::string> words, std::span<const Span> spans);

// Draws span lengths from Poisson(span_lambda) (zero draws redrawn, the last
// span clipped so the total does not overshoot the target) and places each
// span uniformly among the start positions where it fits inside the
// still-unmasked region. Stops at mask_target() words or when no room is left.
MaskResult span_mask(std::span<const std::string> words, const NoiseConfig& cfg,
                     Rng& rng);

// Uniform permutation of [0, n) when cfg.permute_sentences, else identity.
std::vector<std::size_t> sentence_order(std::size_t n, const NoiseConfig& cfg,
                                        Rng& rng);

std::vector<Words> permute_sentences(std::span<const Words> sentences,
                                     const NoiseConfig& cfg, Rng& rng);

struct NoisedText {
  Words words;                            // final noised sequence
  std::vector<std::size_t> order;         // order[k] = input index of k-th sentence
  std::vector<std::size_t> boundaries;    // sentence starts before masking
  MaskResult mask;
};

// Permute, flatten, then span-mask the flattened sequence.
NoisedText apply_g_phi(std::span<const Words> sentences, const NoiseConfig& cfg,
                       Rng& rng);

}  // namespace mixdenoise

#endif  // MIXDENOISE_NOISING_HPP_
