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

#include "mixdenoise/noising.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixdenoise/error.hpp"

namespace mixdenoise {

void DictNoiseConfig::validate() const {
  if (!(p_r >= 0.0 && p_r <= 1.0)) {
    throw ConfigError("p_r must be in [0, 1]");
  }
  if (languages.empty()) {
    throw ConfigError("dictionary noise needs at least one language");
  }
}

void NoiseConfig::validate() const {
  if (!(mask_ratio >= 0.0 && mask_ratio <= 1.0)) {
    throw ConfigError("mask_ratio must be in [0, 1]");
  }
  if (!(span_lambda > 0.0 && span_lambda <= Rng::kMaxPoissonMean)) {
    throw ConfigError("span_lambda must be in (0, 500]");
  }
}

std::vector<LanguageId> replacement_languages(const DictNoiseConfig& cfg,
                                              const LanguageId& lang) {
  std::vector<LanguageId> out;
  for (const auto& l : cfg.languages) {
    if (l != lang && std::find(out.begin(), out.end(), l) == out.end()) {
      out.push_back(l);
    }
  }
  return out;
}

DictNoiseResult dictionary_noise(std::span<const std::string> words,
                                 const LanguageId& lang, const Dictionary& dict,
                                 const DictNoiseConfig& cfg, Rng& rng) {
  DictNoiseResult result;
  result.words.reserve(words.size());
  const auto candidates = replacement_languages(cfg, lang);
  if (cfg.p_r == 0.0 || candidates.empty()) {
    result.words.assign(words.begin(), words.end());
    return result;
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!rng.bernoulli(cfg.p_r)) {
      result.words.push_back(words[i]);
      continue;
    }
    ++result.language_draws;
    const LanguageId& target = candidates[rng.uniform_index(candidates.size())];
    const auto translations = dict.lookup(lang, words[i], target);
    if (translations.empty()) {
      result.words.push_back(words[i]);
      continue;
    }
    const std::string& chosen =
        translations.size() == 1
            ? translations.front()
            : translations[rng.uniform_index(translations.size())];
    Words spliced = tokenize_words(chosen);
    if (spliced.empty()) {
      result.words.push_back(words[i]);
      continue;
    }
    result.replacements.push_back(
        {i, target, chosen, result.words.size(), spliced.size()});
    for (auto& w : spliced) result.words.push_back(std::move(w));
  }
  return result;
}

std::size_t mask_target(std::size_t n, double ratio) {
  // The epsilon absorbs representation error, e.g. 0.35 * 100.
  const double raw = std::ceil(ratio * static_cast<double>(n) - 1e-9);
  if (raw <= 0.0) return 0;
  return std::min(n, static_cast<std::size_t>(raw));
}

Words apply_spans(std::span<const std::string> words,
                  std::span<const Span> spans) {
  std::vector<Span> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  Words out;
  out.reserve(words.size());
  std::size_t pos = 0;
  for (const Span& s : sorted) {
    if (s.length == 0 || s.start < pos || s.start + s.length > words.size()) {
      throw DataError("mask spans overlap or fall outside the input");
    }
    out.insert(out.end(), words.begin() + static_cast<std::ptrdiff_t>(pos),
               words.begin() + static_cast<std::ptrdiff_t>(s.start));
    out.emplace_back(kMaskToken);
    pos = s.start + s.length;
  }
  out.insert(out.end(), words.begin() + static_cast<std::ptrdiff_t>(pos),
             words.end());
  return out;
}

MaskResult span_mask(std::span<const std::string> words, const NoiseConfig& cfg,
                     Rng& rng) {
  MaskResult result;
  result.input_length = words.size();
  const std::size_t target = mask_target(words.size(), cfg.mask_ratio);
  std::vector<bool> taken(words.size(), false);

  struct Run {
    std::size_t start;
    std::size_t length;
  };
  std::vector<Run> runs;
  const auto collect_runs = [&] {
    runs.clear();
    for (std::size_t i = 0; i < taken.size();) {
      if (taken[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < taken.size() && !taken[j]) ++j;
      runs.push_back({i, j - i});
      i = j;
    }
  };
  const auto start_count = [&](std::size_t len) {
    std::size_t count = 0;
    for (const Run& r : runs) {
      if (r.length >= len) count += r.length - len + 1;
    }
    return count;
  };

  while (result.masked < target) {
    std::size_t len = 0;
    while (len == 0) len = rng.poisson(cfg.span_lambda);
    len = std::min(len, target - result.masked);

    collect_runs();
    std::size_t starts = start_count(len);
    if (starts == 0) {
      std::size_t longest = 0;
      for (const Run& r : runs) longest = std::max(longest, r.length);
      if (longest == 0) break;
      len = longest;
      starts = start_count(len);
    }
    std::size_t pick = rng.uniform_index(starts);
    std::size_t start = 0;
    for (const Run& r : runs) {
      if (r.length < len) continue;
      const std::size_t here = r.length - len + 1;
      if (pick < here) {
        start = r.start + pick;
        break;
      }
      pick -= here;
    }
    std::fill(taken.begin() + static_cast<std::ptrdiff_t>(start),
              taken.begin() + static_cast<std::ptrdiff_t>(start + len), true);
    result.spans.push_back({start, len});
    result.masked += len;
  }

  std::sort(result.spans.begin(), result.spans.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  result.words = apply_spans(words, result.spans);
  return result;
}

std::vector<std::size_t> sentence_order(std::size_t n, const NoiseConfig& cfg,
                                        Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (cfg.permute_sentences) rng.shuffle(std::span(order));
  return order;
}

std::vector<Words> permute_sentences(std::span<const Words> sentences,
                                     const NoiseConfig& cfg, Rng& rng) {
  std::vector<Words> out;
  out.reserve(sentences.size());
  for (const std::size_t i : sentence_order(sentences.size(), cfg, rng)) {
    out.push_back(sentences[i]);
  }
  return out;
}

NoisedText apply_g_phi(std::span<const Words> sentences, const NoiseConfig& cfg,
                       Rng& rng) {
  NoisedText out;
  out.order = sentence_order(sentences.size(), cfg, rng);
  Words flat;
  for (const std::size_t i : out.order) {
    out.boundaries.push_back(flat.size());
    flat.insert(flat.end(), sentences[i].begin(), sentences[i].end());
  }
  out.mask = span_mask(flat, cfg, rng);
  out.words = out.mask.words;
  return out;
}

}  // namespace mixdenoise
