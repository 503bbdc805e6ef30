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

#include "mixdenoise/records.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "mixdenoise/error.hpp"

namespace mixdenoise {
namespace {

using nlohmann::json;

Words flatten(std::span<const Words> sentences) {
  Words out;
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

// Keeps the framed source within max_len.
bool clip_source(Words& words, std::size_t max_len) {
  if (words.size() + 2 <= max_len) return false;
  words.resize(max_len - 2);
  return true;
}

MaskTrace to_trace(const MaskResult& m) {
  return MaskTrace{m.input_length, m.masked, m.spans};
}

TrainingRecord denoising_record(Task task, const SentenceWindow& window,
                                std::span<const Words> noisable,
                                const Vocab& vocab, const RecordConfig& cfg,
                                Rng& phi_rng, NoiseTrace trace) {
  NoisedText noised = apply_g_phi(noisable, cfg.noise, phi_rng);
  Words source = std::move(noised.words);
  TrainingRecord record{
      task,
      TokenSeq{{}, window.lang},
      encode(flatten(window.sentences), window.lang, vocab, Framing::kTarget),
      window.provenance,
      window.truncated,
      clip_source(source, cfg.max_len),
      std::nullopt};
  record.source = encode(source, window.lang, vocab, Framing::kSource);
  if (cfg.trace) {
    trace.order = std::move(noised.order);
    trace.masks.push_back(to_trace(noised.mask));
    record.trace = std::move(trace);
  }
  return record;
}

}  // namespace

void RecordConfig::validate() const {
  noise.validate();
  dict_noise.validate();
  if (max_len < 3) throw ConfigError("max_len must be at least 3");
}

SentenceWindow build_window(const LanguageId& lang, const std::string& shard,
                            std::span<const Words> sentences, std::size_t start,
                            std::size_t max_len) {
  if (start >= sentences.size()) {
    throw DataError("window start " + std::to_string(start) +
                    " outside shard '" + shard + "'");
  }
  if (max_len < 3) throw ConfigError("max_len must be at least 3");
  const std::size_t budget = max_len - 2;
  SentenceWindow window{lang, {}, {}, false};
  std::size_t used = 0;
  for (std::size_t i = start; i < sentences.size(); ++i) {
    const Words& s = sentences[i];
    if (window.sentences.empty() && s.size() > budget) {
      window.sentences.emplace_back(s.begin(),
                                    s.begin() + static_cast<std::ptrdiff_t>(budget));
      window.provenance.push_back({shard, i});
      window.truncated = true;
      break;
    }
    if (used + s.size() > budget) break;
    used += s.size();
    window.sentences.push_back(s);
    window.provenance.push_back({shard, i});
  }
  return window;
}

TokenSeq encode_segments(std::span<const Words> segments, const LanguageId& lang,
                         const Vocab& vocab, Framing framing) {
  TokenSeq seq{{}, lang};
  const TokenId tag = vocab.lang_tag(lang);
  if (framing == Framing::kTarget) seq.ids.push_back(tag);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (const auto& w : segments[i]) seq.ids.push_back(vocab.id(w));
    if (framing == Framing::kSource && i + 1 == segments.size()) {
      seq.ids.push_back(tag);
    }
    seq.ids.push_back(Vocab::kEos);
  }
  return seq;
}

std::size_t segment_count(const TokenSeq& seq) {
  return static_cast<std::size_t>(
      std::count(seq.ids.begin(), seq.ids.end(), Vocab::kEos));
}

TrainingRecord make_mono_record(const SentenceWindow& window, const Vocab& vocab,
                                const RecordConfig& cfg, Rng& rng) {
  if (window.sentences.empty()) throw DataError("empty sentence window");
  Rng phi = rng.split("phi");
  return denoising_record(Task::kMono, window, window.sentences, vocab, cfg,
                          phi, NoiseTrace{});
}

TrainingRecord make_dict_record(const SentenceWindow& window,
                                const Dictionary& dict, const Vocab& vocab,
                                const RecordConfig& cfg, Rng& rng) {
  if (window.sentences.empty()) throw DataError("empty sentence window");
  Rng dict_rng = rng.split("dict");
  Rng phi = rng.split("phi");

  NoiseTrace trace;
  std::vector<Words> replaced;
  replaced.reserve(window.sentences.size());
  std::size_t in_offset = 0;
  std::size_t out_offset = 0;
  for (const Words& sentence : window.sentences) {
    DictNoiseResult r =
        dictionary_noise(sentence, window.lang, dict, cfg.dict_noise, dict_rng);
    for (Replacement& rep : r.replacements) {
      rep.position += in_offset;
      rep.output_start += out_offset;
      trace.replacements.push_back(std::move(rep));
    }
    trace.language_draws += r.language_draws;
    in_offset += sentence.size();
    out_offset += r.words.size();
    replaced.push_back(std::move(r.words));
  }
  trace.dict_words = in_offset;
  return denoising_record(Task::kDict, window, replaced, vocab, cfg, phi,
                          std::move(trace));
}

bool truncate_pair(Words& source, Words& target, std::size_t max_len) {
  const std::size_t budget = max_len - 2;
  const std::size_t longest = std::max(source.size(), target.size());
  if (longest <= budget) return false;
  const auto cut = [&](Words& w) {
    // floor(len * budget / longest), at least one word.
    const std::size_t keep =
        std::max<std::size_t>(1, w.size() * budget / longest);
    if (w.size() > keep) w.resize(keep);
  };
  cut(source);
  cut(target);
  return true;
}

BitextPacker::BitextPacker(Direction direction, std::size_t max_len)
    : max_len_(max_len), packed_{std::move(direction), {}, {}, {}, false} {
  if (max_len < 3) throw ConfigError("max_len must be at least 3");
}

bool BitextPacker::try_add(const WordPair& pair) {
  if (pair.direction != packed_.direction) {
    throw DataError("cannot pack " + pair.direction.key() + " with " +
                    packed_.direction.key());
  }
  if (pair.source.empty() || pair.target.empty()) {
    throw DataError("cannot pack a pair with an empty side");
  }
  Words source = pair.source;
  Words target = pair.target;
  if (empty()) {
    packed_.truncated = truncate_pair(source, target, max_len_);
  } else if (source_tokens_ + source.size() + 1 > max_len_ ||
             target_tokens_ + target.size() + 1 > max_len_) {
    return false;
  }
  source_tokens_ += source.size() + 1;
  target_tokens_ += target.size() + 1;
  packed_.source_segments.push_back(std::move(source));
  packed_.target_segments.push_back(std::move(target));
  packed_.provenance.push_back(pair.origin);
  return true;
}

PackedPair BitextPacker::finish() {
  if (empty()) throw DataError("finishing an empty pack");
  PackedPair out = std::move(packed_);
  packed_ = PackedPair{out.direction, {}, {}, {}, false};
  source_tokens_ = target_tokens_ = 1;
  return out;
}

std::vector<PackedPair> pack_bitext(std::span<const WordPair> pairs,
                                    std::size_t max_len, Rng& rng) {
  std::vector<PackedPair> out;
  if (pairs.empty()) return out;
  for (const auto& p : pairs) {
    if (p.direction != pairs.front().direction) {
      throw DataError("pack_bitext input mixes directions " +
                      pairs.front().direction.key() + " and " +
                      p.direction.key());
    }
  }
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));

  BitextPacker packer(pairs.front().direction, max_len);
  for (const std::size_t i : order) {
    if (!packer.try_add(pairs[i])) {
      out.push_back(packer.finish());
      packer.try_add(pairs[i]);
    }
  }
  out.push_back(packer.finish());
  return out;
}

TrainingRecord make_bitext_record(const PackedPair& packed, const Vocab& vocab,
                                  const RecordConfig& cfg, Rng& rng) {
  if (packed.source_segments.empty() ||
      packed.source_segments.size() != packed.target_segments.size()) {
    throw DataError("packed pair has mismatched segments");
  }
  Rng phi = rng.split("phi");
  NoiseTrace trace;
  std::vector<Words> noised;
  noised.reserve(packed.source_segments.size());
  for (const Words& segment : packed.source_segments) {
    NoisedText n = apply_g_phi(std::span(&segment, 1), cfg.noise, phi);
    trace.masks.push_back(to_trace(n.mask));
    noised.push_back(std::move(n.words));
  }
  TrainingRecord record{
      Task::kBitext,
      encode_segments(noised, packed.direction.src, vocab, Framing::kSource),
      encode_segments(packed.target_segments, packed.direction.tgt, vocab,
                      Framing::kTarget),
      packed.provenance,
      packed.truncated,
      false,
      std::nullopt};
  if (cfg.trace) record.trace = std::move(trace);
  return record;
}

BatchAssembler::BatchAssembler(std::size_t token_budget) : budget_(token_budget) {
  if (token_budget == 0) throw ConfigError("token budget must be positive");
}

std::optional<Batch> BatchAssembler::push(TrainingRecord record) {
  const std::size_t tokens = record.token_count();
  if (tokens > budget_) {
    throw DataError("record of " + std::to_string(tokens) +
                    " tokens exceeds the batch budget of " +
                    std::to_string(budget_));
  }
  std::optional<Batch> done;
  if (current_.token_count + tokens > budget_) {
    done = std::move(current_);
    current_ = Batch{};
  }
  current_.token_count += tokens;
  current_.records.push_back(std::move(record));
  return done;
}

std::optional<Batch> BatchAssembler::flush() {
  if (current_.records.empty()) return std::nullopt;
  Batch done = std::move(current_);
  current_ = Batch{};
  return done;
}

std::vector<Batch> assemble_batches(std::vector<TrainingRecord> records,
                                    std::size_t token_budget) {
  BatchAssembler assembler(token_budget);
  std::vector<Batch> out;
  for (auto& r : records) {
    if (auto b = assembler.push(std::move(r))) out.push_back(std::move(*b));
  }
  if (auto b = assembler.flush()) out.push_back(std::move(*b));
  return out;
}

std::string record_to_json(const TrainingRecord& record) {
  json j;
  j["task"] = to_string(record.task);
  j["src_lang"] = record.src_lang().code();
  j["tgt_lang"] = record.tgt_lang().code();
  j["source_ids"] = record.source.ids;
  j["target_ids"] = record.target.ids;
  json prov = json::array();
  for (const auto& p : record.provenance) prov.push_back({p.shard, p.line});
  j["provenance"] = std::move(prov);
  if (record.truncated) j["truncated"] = true;
  if (record.source_truncated) j["source_truncated"] = true;
  if (record.trace) {
    const NoiseTrace& t = *record.trace;
    json trace;
    if (!t.order.empty()) trace["order"] = t.order;
    json masks = json::array();
    for (const auto& m : t.masks) {
      json spans = json::array();
      for (const auto& s : m.spans) spans.push_back({s.start, s.length});
      masks.push_back({{"len", m.length}, {"masked", m.masked}, {"spans", spans}});
    }
    trace["mask"] = std::move(masks);
    if (record.task == Task::kDict) {
      json reps = json::array();
      for (const auto& r : t.replacements) {
        reps.push_back({r.position, r.lang.code(), r.translation, r.output_start,
                        r.output_length});
      }
      trace["replaced"] = std::move(reps);
      trace["dict_words"] = t.dict_words;
      trace["draws"] = t.language_draws;
    }
    j["trace"] = std::move(trace);
  }
  return j.dump();
}

TrainingRecord record_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    TrainingRecord r{
        parse_task(j.at("task").get<std::string>()),
        TokenSeq{j.at("source_ids").get<std::vector<TokenId>>(),
                 LanguageId(j.at("src_lang").get<std::string>())},
        TokenSeq{j.at("target_ids").get<std::vector<TokenId>>(),
                 LanguageId(j.at("tgt_lang").get<std::string>())},
        {},
        j.value("truncated", false),
        j.value("source_truncated", false),
        std::nullopt};
    for (const auto& p : j.at("provenance")) {
      r.provenance.push_back(
          {p.at(0).get<std::string>(), p.at(1).get<std::size_t>()});
    }
    if (const auto it = j.find("trace"); it != j.end()) {
      NoiseTrace t;
      t.order = it->value("order", std::vector<std::size_t>{});
      for (const auto& m : it->at("mask")) {
        MaskTrace mt{m.at("len").get<std::size_t>(),
                     m.at("masked").get<std::size_t>(), {}};
        for (const auto& s : m.at("spans")) {
          mt.spans.push_back({s.at(0).get<std::size_t>(),
                              s.at(1).get<std::size_t>()});
        }
        t.masks.push_back(std::move(mt));
      }
      if (const auto reps = it->find("replaced"); reps != it->end()) {
        for (const auto& rep : *reps) {
          t.replacements.push_back({rep.at(0).get<std::size_t>(),
                                    LanguageId(rep.at(1).get<std::string>()),
                                    rep.at(2).get<std::string>(),
                                    rep.at(3).get<std::size_t>(),
                                    rep.at(4).get<std::size_t>()});
        }
      }
      t.dict_words = it->value("dict_words", std::size_t{0});
      t.language_draws = it->value("draws", std::size_t{0});
      r.trace = std::move(t);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed record: ") + e.what());
  }
}

}  // namespace mixdenoise
