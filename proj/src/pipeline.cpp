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

#include "mixdenoise/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "mixdenoise/error.hpp"
#include "mixdenoise/hash.hpp"

namespace mixdenoise {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kFormat = "mixdenoise-batches/1";
constexpr double kZ = 3.29;  // two-sided 99.9% normal quantile

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is
// rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(jobs, 1u), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

template <typename T>
T take(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

std::string batch_file_name(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "batch-%06zu.jsonl", index);
  return name;
}

bool is_batch_file(const fs::path& p) {
  const std::string name = p.filename().string();
  return name.rfind("batch-", 0) == 0 && p.extension() == ".jsonl";
}

// Tokenized corpora with bucket layout: a language (or direction) bucket is
// the concatenation of its shards in config order.
struct Tokenized {
  std::vector<std::vector<Words>> mono;
  std::vector<std::vector<WordPair>> bitext;
  std::map<Bucket, std::vector<std::size_t>> buckets;  // bucket -> shard indices

  // (shard index, line) of `item` inside `bucket`.
  std::pair<std::size_t, std::size_t> locate(const Bucket& bucket,
                                             std::size_t item) const {
    const bool is_mono = std::holds_alternative<LanguageId>(bucket);
    for (const std::size_t shard : buckets.at(bucket)) {
      const std::size_t n = is_mono ? mono[shard].size() : bitext[shard].size();
      if (item < n) return {shard, item};
      item -= n;
    }
    throw DataError("item outside bucket '" + bucket_key(bucket) + "'");
  }
};

Tokenized tokenize_corpora(const Corpora& corpora, unsigned jobs) {
  Tokenized t;
  t.mono.resize(corpora.mono.size());
  t.bitext.resize(corpora.bitext.size());
  const std::size_t n_mono = corpora.mono.size();
  parallel_for(n_mono + corpora.bitext.size(), jobs, [&](std::size_t i) {
    if (i < n_mono) {
      for (const auto& s : corpora.mono[i].sentences) {
        t.mono[i].push_back(tokenize_words(s));
      }
      return;
    }
    const std::size_t b = i - n_mono;
    const BitextShard& shard = corpora.bitext[b];
    for (std::size_t k = 0; k < shard.pairs.size(); ++k) {
      t.bitext[b].push_back({shard.direction,
                             tokenize_words(shard.pairs[k].source),
                             tokenize_words(shard.pairs[k].target),
                             {bitext_shard_id(b), k}});
    }
  });
  for (std::size_t i = 0; i < corpora.mono.size(); ++i) {
    t.buckets[corpora.mono[i].lang].push_back(i);
  }
  for (std::size_t i = 0; i < corpora.bitext.size(); ++i) {
    t.buckets[corpora.bitext[i].direction].push_back(i);
  }
  return t;
}

struct Job {
  Task task;
  std::optional<SentenceWindow> window;
  std::optional<PackedPair> packed;
};

Job plan_job(const Draw& draw, const Tokenized& tok, SampleStream& stream,
             std::size_t max_len) {
  const auto [shard, line] = tok.locate(draw.bucket, draw.item);
  if (draw.task != Task::kBitext) {
    const auto& lang = std::get<LanguageId>(draw.bucket);
    return Job{draw.task,
               build_window(lang, mono_shard_id(shard), tok.mono[shard], line,
                            max_len),
               std::nullopt};
  }
  const auto& direction = std::get<Direction>(draw.bucket);
  BitextPacker packer(direction, max_len);
  packer.try_add(tok.bitext[shard][line]);
  std::set<std::size_t> used{draw.item};
  EpochCursor& cursor = stream.cursor(Task::kBitext, draw.bucket);
  for (;;) {
    const std::size_t item = cursor.peek();
    // A pack never repeats a pair, even when the bucket wraps.
    if (used.count(item)) break;
    const auto [s, l] = tok.locate(draw.bucket, item);
    if (!packer.try_add(tok.bitext[s][l])) break;
    cursor.advance();
    used.insert(item);
  }
  return Job{Task::kBitext, std::nullopt, packer.finish()};
}

json manifest_json_object(const CorpusManifest& m) {
  return json::parse(m.to_json());
}

std::string task_key(Task t) { return std::string(to_string(t)); }

// ---- verification helpers ----

struct Check {
  CheckResult result;

  explicit Check(std::string name) { result.name = std::move(name); }
  void pass() { ++result.checked; }
  void fail(std::size_t index, const std::string& detail) {
    ++result.checked;
    ++result.violations;
    if (!result.first_violation) {
      result.first_violation = index;
      result.detail = "record " + std::to_string(index) + ": " + detail;
    }
  }
  void expect(bool ok, std::size_t index, const std::string& detail) {
    ok ? pass() : fail(index, detail);
  }
  CheckResult done() {
    if (result.violations > 0) result.status = CheckStatus::kFail;
    return std::move(result);
  }
};

std::pair<std::string, std::size_t> parse_shard_id(const std::string& id) {
  const auto slash = id.find('/');
  if (slash == std::string::npos) throw DataError("bad shard id '" + id + "'");
  return {id.substr(0, slash), std::stoul(id.substr(slash + 1))};
}

// Clean sentences a MONO/DICT record was built from, cut like build_window.
std::vector<Words> clean_sentences(const TrainingRecord& r, const Tokenized& tok,
                                   std::size_t max_len) {
  std::vector<Words> out;
  for (const auto& src : r.provenance) {
    const auto [kind, shard] = parse_shard_id(src.shard);
    if (kind != "mono" || shard >= tok.mono.size() ||
        src.line >= tok.mono[shard].size()) {
      throw DataError("provenance " + src.shard + ":" +
                      std::to_string(src.line) + " does not exist");
    }
    out.push_back(tok.mono[shard][src.line]);
  }
  if (r.truncated && out.size() == 1 && out[0].size() > max_len - 2) {
    out[0].resize(max_len - 2);
  }
  return out;
}

std::vector<WordPair> clean_pairs(const TrainingRecord& r, const Tokenized& tok,
                                  std::size_t max_len) {
  std::vector<WordPair> out;
  for (const auto& src : r.provenance) {
    const auto [kind, shard] = parse_shard_id(src.shard);
    if (kind != "bitext" || shard >= tok.bitext.size() ||
        src.line >= tok.bitext[shard].size()) {
      throw DataError("provenance " + src.shard + ":" +
                      std::to_string(src.line) + " does not exist");
    }
    out.push_back(tok.bitext[shard][src.line]);
  }
  if (r.truncated && out.size() == 1) {
    truncate_pair(out[0].source, out[0].target, max_len);
  }
  return out;
}

// Rebuilds the noised source of a traced record from clean text and trace.
TokenSeq replay_source(const TrainingRecord& r, const Tokenized& tok,
                       const Vocab& vocab, std::size_t max_len) {
  const NoiseTrace& trace = *r.trace;
  if (r.task == Task::kBitext) {
    const auto pairs = clean_pairs(r, tok, max_len);
    if (trace.masks.size() != pairs.size()) {
      throw DataError("trace has " + std::to_string(trace.masks.size()) +
                      " mask entries for " + std::to_string(pairs.size()) +
                      " segments");
    }
    std::vector<Words> segments;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (trace.masks[i].length != pairs[i].source.size()) {
        throw DataError("mask length does not match segment length");
      }
      segments.push_back(apply_spans(pairs[i].source, trace.masks[i].spans));
    }
    return encode_segments(segments, r.src_lang(), vocab, Framing::kSource);
  }

  std::vector<Words> sentences = clean_sentences(r, tok, max_len);
  if (r.task == Task::kDict) {
    std::map<std::size_t, const Replacement*> by_pos;
    for (const auto& rep : trace.replacements) by_pos[rep.position] = &rep;
    std::size_t in_pos = 0;
    std::size_t out_pos = 0;
    for (Words& sentence : sentences) {
      Words replaced;
      for (const auto& w : sentence) {
        const auto it = by_pos.find(in_pos++);
        if (it == by_pos.end()) {
          replaced.push_back(w);
          continue;
        }
        Words spliced = tokenize_words(it->second->translation);
        if (it->second->output_start != out_pos + replaced.size() ||
            it->second->output_length != spliced.size()) {
          throw DataError("replacement offsets are inconsistent");
        }
        for (auto& s : spliced) replaced.push_back(std::move(s));
      }
      out_pos += replaced.size();
      sentence = std::move(replaced);
    }
  }
  if (trace.order.size() != sentences.size() || trace.masks.size() != 1) {
    throw DataError("trace does not match the sentence window");
  }
  Words flat;
  for (const std::size_t i : trace.order) {
    if (i >= sentences.size()) throw DataError("bad sentence order in trace");
    flat.insert(flat.end(), sentences[i].begin(), sentences[i].end());
  }
  if (trace.masks[0].length != flat.size()) {
    throw DataError("mask length does not match the window length");
  }
  Words source = apply_spans(flat, trace.masks[0].spans);
  if (source.size() + 2 > max_len) source.resize(max_len - 2);
  return encode(source, r.src_lang(), vocab, Framing::kSource);
}

double mix_tolerance(const std::map<std::string, double>& probs, std::size_t n) {
  double tol = 0.0;
  for (const auto& [k, p] : probs) {
    tol += kZ * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  }
  return 0.5 * tol + 1e-12;
}

template <typename Key>
std::map<std::string, double> keyed(const std::map<Key, double>& probs) {
  std::map<std::string, double> out;
  for (const auto& [k, p] : probs) {
    if constexpr (std::is_same_v<Key, LanguageId>) {
      out[k.code()] = p;
    } else if constexpr (std::is_same_v<Key, Direction>) {
      out[k.key()] = p;
    } else {
      out[task_key(k)] = p;
    }
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string mono_shard_id(std::size_t index) {
  return "mono/" + std::to_string(index);
}

std::string bitext_shard_id(std::size_t index) {
  return "bitext/" + std::to_string(index);
}

// ---- config ----

void PipelineConfig::validate() const {
  if (mono.empty()) throw ConfigError("config needs at least one mono corpus");
  record.validate();
  sampler.validate();
  if (token_budget < 2 * record.max_len) {
    throw ConfigError("token_budget must be at least 2 * max_len");
  }
  if (num_records == 0) throw ConfigError("records must be positive");
  if (sampler.allows(Task::kDict) && !dictionary_dir) {
    throw ConfigError("the dict task needs dictionary_dir");
  }
  const std::set<LanguageId> langs(languages().begin(), languages().end());
  const auto known = [&](const LanguageId& l) {
    if (!langs.count(l)) {
      throw ConfigError("language '" + l.code() + "' is not in 'languages'");
    }
  };
  for (const auto& m : mono) known(m.lang);
  for (const auto& b : bitext) {
    known(b.direction.src);
    known(b.direction.tgt);
  }
  if (!(bitext_options.reject_threshold >= 0.0 &&
        bitext_options.reject_threshold <= 1.0)) {
    throw ConfigError("reject_threshold must be in [0, 1]");
  }
}

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base) {
  static const std::set<std::string> kKeys = {
      "languages", "english", "mono", "bitext", "dictionary_dir", "vocab",
      "vocab_size", "p_r", "mask_ratio", "span_lambda", "permute_sentences",
      "alpha_mono", "alpha_bitext", "alpha_task", "halve_to_english", "tasks",
      "seed", "max_len", "token_budget", "records", "trace", "max_pairs",
      "reject_threshold", "output"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  PipelineConfig c;
  try {
    for (const auto& m : j.value("mono", json::array())) {
      c.mono.push_back({resolve(base, m.at("path").get<std::string>()),
                        LanguageId(m.at("lang").get<std::string>())});
    }
    for (const auto& b : j.value("bitext", json::array())) {
      c.bitext.push_back({resolve(base, b.at("path").get<std::string>()),
                          Direction(LanguageId(b.at("src").get<std::string>()),
                                    LanguageId(b.at("tgt").get<std::string>()))});
    }
    if (j.contains("dictionary_dir")) {
      c.dictionary_dir = resolve(base, j["dictionary_dir"].get<std::string>());
    }
    if (j.contains("vocab")) {
      c.vocab_path = resolve(base, j["vocab"].get<std::string>());
    }
    c.vocab_size = take<std::size_t>(j, "vocab_size", c.vocab_size);

    std::vector<LanguageId> langs;
    if (j.contains("languages")) {
      for (const auto& l : j["languages"]) {
        langs.emplace_back(l.get<std::string>());
      }
    } else {
      std::set<LanguageId> seen;
      for (const auto& m : c.mono) seen.insert(m.lang);
      for (const auto& b : c.bitext) {
        seen.insert(b.direction.src);
        seen.insert(b.direction.tgt);
      }
      langs.assign(seen.begin(), seen.end());
    }
    c.record.dict_noise.languages = std::move(langs);
    c.record.dict_noise.p_r = take(j, "p_r", c.record.dict_noise.p_r);
    c.record.noise.mask_ratio = take(j, "mask_ratio", c.record.noise.mask_ratio);
    c.record.noise.span_lambda =
        take(j, "span_lambda", c.record.noise.span_lambda);
    c.record.noise.permute_sentences =
        take(j, "permute_sentences", c.record.noise.permute_sentences);
    c.record.max_len = take<std::size_t>(j, "max_len", c.record.max_len);
    c.record.trace = take(j, "trace", c.record.trace);

    c.sampler.alpha_mono = take(j, "alpha_mono", c.sampler.alpha_mono);
    c.sampler.alpha_bitext = take(j, "alpha_bitext", c.sampler.alpha_bitext);
    c.sampler.alpha_task = take(j, "alpha_task", c.sampler.alpha_task);
    c.sampler.halve_to_english =
        take(j, "halve_to_english", c.sampler.halve_to_english);
    c.sampler.english = LanguageId(take<std::string>(j, "english", "en"));
    c.sampler.seed = take<std::uint64_t>(j, "seed", c.sampler.seed);
    if (j.contains("tasks")) {
      c.sampler.tasks.clear();
      for (const auto& t : j["tasks"]) {
        c.sampler.tasks.push_back(parse_task(t.get<std::string>()));
      }
    }
    c.token_budget = take<std::size_t>(j, "token_budget", c.token_budget);
    c.num_records = take<std::size_t>(j, "records", c.num_records);
    c.bitext_options.max_pairs =
        take<std::size_t>(j, "max_pairs", c.bitext_options.max_pairs);
    c.bitext_options.reject_threshold =
        take(j, "reject_threshold", c.bitext_options.reject_threshold);
    if (j.contains("output")) {
      c.output = resolve(base, j["output"].get<std::string>());
    } else {
      c.output = resolve(base, c.output);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

json PipelineConfig::to_json(bool with_output) const {
  json j;
  j["languages"] = json::array();
  for (const auto& l : languages()) j["languages"].push_back(l.code());
  j["english"] = sampler.english.code();
  j["mono"] = json::array();
  for (const auto& m : mono) {
    j["mono"].push_back({{"path", m.path.string()}, {"lang", m.lang.code()}});
  }
  j["bitext"] = json::array();
  for (const auto& b : bitext) {
    j["bitext"].push_back({{"path", b.path.string()},
                           {"src", b.direction.src.code()},
                           {"tgt", b.direction.tgt.code()}});
  }
  if (dictionary_dir) j["dictionary_dir"] = dictionary_dir->string();
  if (vocab_path) j["vocab"] = vocab_path->string();
  j["vocab_size"] = vocab_size;
  j["p_r"] = record.dict_noise.p_r;
  j["mask_ratio"] = record.noise.mask_ratio;
  j["span_lambda"] = record.noise.span_lambda;
  j["permute_sentences"] = record.noise.permute_sentences;
  j["alpha_mono"] = sampler.alpha_mono;
  j["alpha_bitext"] = sampler.alpha_bitext;
  j["alpha_task"] = sampler.alpha_task;
  j["halve_to_english"] = sampler.halve_to_english;
  j["tasks"] = json::array();
  for (const Task t : sampler.tasks) j["tasks"].push_back(to_string(t));
  j["seed"] = sampler.seed;
  j["max_len"] = record.max_len;
  j["token_budget"] = token_budget;
  j["records"] = num_records;
  j["trace"] = record.trace;
  j["max_pairs"] = bitext_options.max_pairs;
  j["reject_threshold"] = bitext_options.reject_threshold;
  if (with_output) j["output"] = output.string();
  return j;
}

PipelineConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return PipelineConfig::from_json(
      j, fs::absolute(path).parent_path().lexically_normal());
}

// ---- loading ----

Corpora load_corpora(const PipelineConfig& cfg, unsigned jobs,
                     bool with_dictionary) {
  std::vector<std::optional<MonoShard>> mono(cfg.mono.size());
  std::vector<std::optional<BitextShard>> bitext(cfg.bitext.size());
  const std::size_t n_mono = cfg.mono.size();
  parallel_for(n_mono + cfg.bitext.size(), jobs, [&](std::size_t i) {
    if (i < n_mono) {
      mono[i] = load_mono(cfg.mono[i].path, cfg.mono[i].lang);
    } else {
      const auto& src = cfg.bitext[i - n_mono];
      bitext[i - n_mono] =
          load_bitext(src.path, src.direction, cfg.bitext_options);
    }
  });
  Corpora c;
  for (auto& m : mono) c.mono.push_back(std::move(*m));
  for (auto& b : bitext) c.bitext.push_back(std::move(*b));
  if (with_dictionary && cfg.dictionary_dir) {
    c.dictionary = load_dictionary(
        *cfg.dictionary_dir,
        std::set<LanguageId>(cfg.languages().begin(), cfg.languages().end()));
  }
  return c;
}

Vocab build_vocab_for(const PipelineConfig& cfg, const Corpora& corpora) {
  return build_vocab(corpora.mono, corpora.bitext, cfg.vocab_size,
                     cfg.languages());
}

Vocab resolve_vocab(const PipelineConfig& cfg, const Corpora& corpora) {
  Vocab vocab = cfg.vocab_path && fs::exists(*cfg.vocab_path)
                    ? Vocab::from_json(read_text(*cfg.vocab_path))
                    : build_vocab_for(cfg, corpora);
  for (const auto& l : cfg.languages()) vocab.lang_tag(l);
  return vocab;
}

// ---- emit ----

EmitSummary emit(const PipelineConfig& cfg, const fs::path& out_dir,
                 unsigned jobs, bool overwrite) {
  cfg.validate();
  if (fs::exists(out_dir)) {
    if (!fs::is_directory(out_dir)) {
      throw ConfigError("'" + out_dir.string() + "' is not a directory");
    }
    if (!fs::is_empty(out_dir)) {
      if (!overwrite) {
        throw ConfigError("output directory '" + out_dir.string() +
                          "' is not empty");
      }
      for (const auto& item : fs::directory_iterator(out_dir)) {
        const auto name = item.path().filename().string();
        if (is_batch_file(item.path()) || name == "manifest.json" ||
            name == "vocab.json") {
          fs::remove(item.path());
        }
      }
    }
  } else {
    fs::create_directories(out_dir);
  }

  const Corpora corpora =
      load_corpora(cfg, jobs, cfg.sampler.allows(Task::kDict));
  const CorpusManifest manifest =
      build_manifest(corpora.mono, corpora.bitext, corpora.dictionary);
  const Vocab vocab = resolve_vocab(cfg, corpora);
  const MixPlan plan = build_mix_plan(manifest, cfg.sampler);
  const Tokenized tok = tokenize_corpora(corpora, jobs);

  const Rng master(cfg.sampler.seed);
  SampleStream stream(plan, manifest, master.split("stream"));
  std::vector<Job> work;
  work.reserve(cfg.num_records);
  for (std::size_t i = 0; i < cfg.num_records; ++i) {
    work.push_back(plan_job(stream.next(), tok, stream, cfg.record.max_len));
  }

  const Rng record_root = master.split("records");
  std::vector<std::optional<TrainingRecord>> built(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    Rng rng = record_root.split(static_cast<std::uint64_t>(i));
    const Job& job = work[i];
    switch (job.task) {
      case Task::kMono:
        built[i] = make_mono_record(*job.window, vocab, cfg.record, rng);
        break;
      case Task::kDict:
        built[i] = make_dict_record(*job.window, corpora.dictionary, vocab,
                                    cfg.record, rng);
        break;
      case Task::kBitext:
        built[i] = make_bitext_record(*job.packed, vocab, cfg.record, rng);
        break;
    }
  });

  EmitSummary summary;
  for (const Task t : kAllTasks) summary.task_counts[t] = 0;
  json batches = json::array();
  BatchAssembler assembler(cfg.token_budget);
  const auto write_batch = [&](const Batch& batch) {
    const std::string name = batch_file_name(summary.batches++);
    std::string body;
    for (const auto& r : batch.records) {
      body += record_to_json(r);
      body += '\n';
    }
    write_text(out_dir / name, body);
    batches.push_back({{"file", name},
                       {"records", batch.records.size()},
                       {"tokens", batch.token_count}});
  };
  for (auto& r : built) {
    ++summary.records;
    summary.tokens += r->token_count();
    ++summary.task_counts[r->task];
    if (auto b = assembler.push(std::move(*r))) write_batch(*b);
  }
  if (auto b = assembler.flush()) write_batch(*b);

  const std::string vocab_text = vocab.to_json();
  write_text(out_dir / "vocab.json", vocab_text);

  const json config = cfg.to_json(false);
  json m;
  m["format"] = kFormat;
  m["config"] = config;
  m["config_hash"] = sha256_hex(config.dump());
  m["seed"] = cfg.sampler.seed;
  m["vocab_file"] = "vocab.json";
  m["vocab_hash"] = sha256_hex(vocab_text);
  m["vocab_size"] = vocab.size();
  m["max_len"] = cfg.record.max_len;
  m["token_budget"] = cfg.token_budget;
  m["corpus"] = manifest_json_object(manifest);
  m["plan"] = json::parse(plan.to_json());
  m["records"] = summary.records;
  m["tokens"] = summary.tokens;
  m["task_counts"] = json::object();
  for (const auto& [t, n] : summary.task_counts) m["task_counts"][task_key(t)] = n;
  m["batches"] = std::move(batches);
  write_text(out_dir / "manifest.json", m.dump(2) + "\n");
  return summary;
}

// ---- verify ----

bool VerifyReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.status == CheckStatus::kFail;
  });
}

const CheckResult* VerifyReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {
std::string_view status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "PASS";
    case CheckStatus::kFail: return "FAIL";
    case CheckStatus::kSkip: return "SKIP";
  }
  return "?";
}
}  // namespace

json VerifyReport::to_json() const {
  json j;
  j["passed"] = passed();
  j["checks"] = json::array();
  for (const auto& c : checks) {
    json item{{"name", c.name},
              {"status", status_name(c.status)},
              {"checked", c.checked},
              {"violations", c.violations},
              {"detail", c.detail}};
    item["first_violation"] =
        c.first_violation ? json(*c.first_violation) : json(nullptr);
    j["checks"].push_back(std::move(item));
  }
  return j;
}

std::string VerifyReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << status_name(c.status) << "  " << c.name << "  checked=" << c.checked
       << " violations=" << c.violations;
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  os << (passed() ? "all checks passed" : "verification FAILED") << '\n';
  return os.str();
}

VerifyReport verify(const fs::path& dir, unsigned jobs) {
  VerifyReport report;
  const json m = json::parse(read_text(dir / "manifest.json"));
  if (m.value("format", "") != kFormat) {
    throw DataError("'" + dir.string() + "' is not an emitted batch directory");
  }
  const PipelineConfig cfg = PipelineConfig::from_json(m.at("config"), dir);
  const std::size_t max_len = m.at("max_len").get<std::size_t>();
  const std::size_t budget = m.at("token_budget").get<std::size_t>();
  const std::string vocab_text = read_text(dir / m.at("vocab_file").get<std::string>());
  const Vocab vocab = Vocab::from_json(vocab_text);
  const MixPlan plan = MixPlan::from_json(m.at("plan").dump());
  const bool need_dict = cfg.sampler.allows(Task::kDict) && cfg.record.trace;
  const Corpora corpora = load_corpora(cfg, jobs, need_dict);
  const Tokenized tok = tokenize_corpora(corpora, jobs);

  // Manifest consistency.
  Check files("manifest");
  std::vector<TrainingRecord> records;
  std::vector<std::size_t> batch_tokens;
  std::vector<std::size_t> batch_sizes;
  files.expect(sha256_hex(vocab_text) == m.at("vocab_hash").get<std::string>(),
               0, "vocab hash mismatch");
  std::set<std::string> listed;
  for (const auto& b : m.at("batches")) {
    const std::string name = b.at("file").get<std::string>();
    listed.insert(name);
    const std::string body = read_text(dir / name);
    std::size_t n = 0;
    std::size_t tokens = 0;
    std::istringstream lines(body);
    for (std::string line; std::getline(lines, line);) {
      if (line.empty()) continue;
      records.push_back(record_from_json(line));
      tokens += records.back().token_count();
      ++n;
    }
    files.expect(n == b.at("records").get<std::size_t>() &&
                     tokens == b.at("tokens").get<std::size_t>(),
                 records.size(), name + " counts differ from the manifest");
    batch_sizes.push_back(n);
    batch_tokens.push_back(tokens);
  }
  for (const auto& item : fs::directory_iterator(dir)) {
    if (is_batch_file(item.path())) {
      files.expect(listed.count(item.path().filename().string()) > 0, 0,
                   "unlisted batch file " + item.path().filename().string());
    }
  }
  std::size_t total_tokens = 0;
  for (const auto& r : records) total_tokens += r.token_count();
  files.expect(records.size() == m.at("records").get<std::size_t>() &&
                   total_tokens == m.at("tokens").get<std::size_t>(),
               0, "record or token totals differ from the manifest");
  report.checks.push_back(files.done());

  Check budget_check("batch_budget");
  for (std::size_t i = 0; i < batch_sizes.size(); ++i) {
    budget_check.expect(batch_sizes[i] > 0 && batch_tokens[i] <= budget, i,
                        "batch " + std::to_string(i) + " empty or over budget");
  }
  report.checks.push_back(budget_check.done());

  Check lengths("lengths");
  Check recon("reconstruction");
  Check purity("bitext_purity");
  Check packing("packing");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TrainingRecord& r = records[i];
    const auto in_vocab = [&](const TokenSeq& s) {
      return std::all_of(s.ids.begin(), s.ids.end(),
                         [&](TokenId id) { return id < vocab.size(); });
    };
    lengths.expect(r.source.ids.size() <= max_len &&
                       r.target.ids.size() <= max_len && in_vocab(r.source) &&
                       in_vocab(r.target),
                   i, "length above max_len or id outside vocabulary");
    try {
      if (r.task == Task::kBitext) {
        const auto pairs = clean_pairs(r, tok, max_len);
        std::vector<Words> targets;
        bool same_direction = r.src_lang() != r.tgt_lang();
        for (const auto& p : pairs) {
          targets.push_back(p.target);
          same_direction = same_direction && p.direction.src == r.src_lang() &&
                           p.direction.tgt == r.tgt_lang();
        }
        const TokenSeq expected =
            encode_segments(targets, r.tgt_lang(), vocab, Framing::kTarget);
        purity.expect(same_direction && expected.ids == r.target.ids, i,
                      "target differs from the clean reference");
        const std::size_t src_segments = segment_count(r.source);
        packing.expect(src_segments == segment_count(r.target) &&
                           src_segments == pairs.size() &&
                           r.source.ids.size() <= max_len &&
                           r.target.ids.size() <= max_len,
                       i, "segment counts or lengths do not line up");
      } else {
        const auto sentences = clean_sentences(r, tok, max_len);
        Words flat;
        for (const auto& s : sentences) flat.insert(flat.end(), s.begin(), s.end());
        const TokenSeq expected =
            encode(flat, r.tgt_lang(), vocab, Framing::kTarget);
        recon.expect(r.src_lang() == r.tgt_lang() && expected.ids == r.target.ids,
                     i, "target does not decode to the clean text");
      }
    } catch (const Error& e) {
      (r.task == Task::kBitext ? purity : recon).fail(i, e.what());
    }
  }
  report.checks.push_back(lengths.done());
  report.checks.push_back(recon.done());
  report.checks.push_back(purity.done());
  report.checks.push_back(packing.done());

  // Trace-based checks.
  Check mask("mask_ratio");
  Check replay("noise_replay");
  Check replacement("replacement_rate");
  std::size_t traced = 0;
  std::size_t masked_words = 0;
  std::size_t mask_input_words = 0;
  double expected_replaced = 0.0;
  double replaced_variance = 0.0;
  std::size_t replaced = 0;
  std::size_t dict_words = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TrainingRecord& r = records[i];
    if (!r.trace) continue;
    ++traced;
    bool mask_ok = true;
    for (const MaskTrace& mt : r.trace->masks) {
      std::size_t sum = 0;
      std::size_t end = 0;
      for (const Span& s : mt.spans) {
        mask_ok = mask_ok && s.length > 0 && s.start >= end &&
                  s.start + s.length <= mt.length;
        end = s.start + s.length;
        sum += s.length;
      }
      mask_ok = mask_ok && sum == mt.masked &&
                mt.masked == mask_target(mt.length, cfg.record.noise.mask_ratio);
      masked_words += mt.masked;
      mask_input_words += mt.length;
    }
    mask.expect(mask_ok, i, "mask spans overlap or miss the target count");
    try {
      replay.expect(replay_source(r, tok, vocab, max_len).ids == r.source.ids, i,
                    "source differs from the replayed noise trace");
    } catch (const Error& e) {
      replay.fail(i, e.what());
    }
    if (r.task == Task::kDict) {
      const auto candidates =
          replacement_languages(cfg.record.dict_noise, r.src_lang());
      const double p_r = cfg.record.dict_noise.p_r;
      try {
        for (const auto& s : clean_sentences(r, tok, max_len)) {
          for (const auto& w : s) {
            std::size_t covered = 0;
            for (const auto& l : candidates) {
              covered += corpora.dictionary.has_entry(r.src_lang(), w, l);
            }
            const double q =
                candidates.empty()
                    ? 0.0
                    : p_r * static_cast<double>(covered) /
                          static_cast<double>(candidates.size());
            expected_replaced += q;
            replaced_variance += q * (1.0 - q);
          }
        }
      } catch (const Error&) {
        // Already reported by the reconstruction check.
      }
      replaced += r.trace->replacements.size();
      dict_words += r.trace->dict_words;
    }
  }
  if (traced == 0) {
    for (Check* c : {&mask, &replay, &replacement}) {
      c->result.status = CheckStatus::kSkip;
      c->result.detail = "no traces (emit with --trace)";
      report.checks.push_back(c->result);
    }
  } else {
    if (mask_input_words > 0 && mask.result.violations == 0) {
      mask.result.detail =
          "masked fraction " +
          format_double(static_cast<double>(masked_words) /
                        static_cast<double>(mask_input_words));
    }
    report.checks.push_back(mask.done());
    report.checks.push_back(replay.done());
    if (dict_words == 0) {
      replacement.result.status = CheckStatus::kSkip;
      replacement.result.detail = "no traced dict records";
      report.checks.push_back(replacement.result);
    } else {
      const double deviation =
          std::abs(static_cast<double>(replaced) - expected_replaced);
      const double bound = kZ * std::sqrt(replaced_variance) + 0.5;
      const std::string detail =
          "rate " +
          format_double(static_cast<double>(replaced) /
                        static_cast<double>(dict_words)) +
          " expected " +
          format_double(expected_replaced / static_cast<double>(dict_words)) +
          " over " + std::to_string(dict_words) + " words";
      if (deviation <= bound) {
        replacement.pass();
        replacement.result.detail = detail;
      } else {
        replacement.fail(0, detail + " (outside the 99.9% interval)");
      }
      report.checks.push_back(replacement.done());
    }
  }

  // Empirical mix against the plan.
  Check mix("task_mix");
  std::map<std::string, std::size_t> task_counts;
  std::map<std::string, std::size_t> mono_counts;
  std::map<std::string, std::size_t> dict_counts;
  std::map<std::string, std::size_t> bitext_counts;
  for (const auto& [t, p] : plan.task_probs) task_counts[task_key(t)] = 0;
  for (const auto& r : records) {
    ++task_counts[task_key(r.task)];
    switch (r.task) {
      case Task::kMono: ++mono_counts[r.src_lang().code()]; break;
      case Task::kDict: ++dict_counts[r.src_lang().code()]; break;
      case Task::kBitext:
        ++bitext_counts[r.src_lang().code() + "-" + r.tgt_lang().code()];
        break;
    }
  }
  std::string mix_detail;
  const auto compare = [&](const char* label,
                           const std::map<std::string, std::size_t>& counts,
                           const std::map<std::string, double>& probs) {
    std::size_t n = 0;
    for (const auto& [k, c] : counts) n += c;
    if (n == 0) return;
    const double tv = total_variation(counts, probs);
    const double tol = mix_tolerance(probs, n);
    mix_detail += std::string(mix_detail.empty() ? "" : ", ") + label +
                  " tv=" + format_double(tv) + "/" + format_double(tol);
    if (tv <= tol) {
      mix.pass();
    } else {
      mix.fail(0, std::string(label) + " frequencies deviate from the plan");
    }
  };
  compare("task", task_counts, keyed(plan.task_probs));
  compare("mono", mono_counts, keyed(plan.mono_probs));
  compare("dict", dict_counts, keyed(plan.dict_probs));
  compare("bitext", bitext_counts, keyed(plan.bitext_probs));
  if (mix.result.violations == 0) mix.result.detail = mix_detail;
  report.checks.push_back(mix.done());
  return report;
}

// ---- stats ----

double total_variation(const std::map<std::string, std::size_t>& counts,
                       const std::map<std::string, double>& probs) {
  std::size_t n = 0;
  for (const auto& [k, c] : counts) n += c;
  std::set<std::string> keys;
  for (const auto& [k, c] : counts) keys.insert(k);
  for (const auto& [k, p] : probs) keys.insert(k);
  double tv = 0.0;
  for (const auto& k : keys) {
    const auto c = counts.find(k);
    const auto p = probs.find(k);
    const double freq =
        (c == counts.end() || n == 0)
            ? 0.0
            : static_cast<double>(c->second) / static_cast<double>(n);
    tv += std::abs(freq - (p == probs.end() ? 0.0 : p->second));
  }
  return 0.5 * tv;
}

EmpiricalMix sample_mix(const MixPlan& plan, const CorpusManifest& manifest,
                        std::size_t draws, Rng rng) {
  SampleStream stream(plan, manifest, rng);
  EmpiricalMix mix;
  mix.draws = draws;
  for (const Task t : kAllTasks) mix.tasks[t] = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const Draw d = stream.next();
    ++mix.tasks[d.task];
    const std::string key = bucket_key(d.bucket);
    switch (d.task) {
      case Task::kMono: ++mix.mono[key]; break;
      case Task::kDict: ++mix.dict[key]; break;
      case Task::kBitext: ++mix.bitext[key]; break;
    }
  }
  return mix;
}

json stats(const PipelineConfig& cfg, std::size_t empirical_draws,
           unsigned jobs) {
  cfg.validate();
  const Corpora corpora = load_corpora(cfg, jobs, true);
  const CorpusManifest manifest =
      build_manifest(corpora.mono, corpora.bitext, corpora.dictionary);
  const MixPlan plan = build_mix_plan(manifest, cfg.sampler);

  json out;
  out["corpus"] = manifest_json_object(manifest);
  out["plan"] = json::parse(plan.to_json());

  json load = json::object();
  for (std::size_t i = 0; i < corpora.mono.size(); ++i) {
    const auto& s = corpora.mono[i].summary;
    load[mono_shard_id(i)] = {{"path", corpora.mono[i].source_path},
                              {"lines", s.lines_read},
                              {"blank", s.blank_lines}};
  }
  for (std::size_t i = 0; i < corpora.bitext.size(); ++i) {
    const auto& s = corpora.bitext[i].summary;
    load[bitext_shard_id(i)] = {{"path", corpora.bitext[i].source_path},
                                {"lines", s.lines_read},
                                {"blank", s.blank_lines},
                                {"malformed", s.malformed_lines},
                                {"malformed_lines", s.malformed_examples}};
  }
  if (cfg.dictionary_dir) {
    const auto& s = corpora.dictionary.summary();
    load["dictionary"] = {{"lines", s.lines_read},
                          {"malformed", s.malformed_lines},
                          {"malformed_lines", s.malformed_examples}};
  }
  out["load"] = std::move(load);

  // UNK rate per language over every tokenized line.
  const Vocab vocab = resolve_vocab(cfg, corpora);
  std::map<std::string, std::pair<std::size_t, std::size_t>> unk;
  const auto count = [&](const LanguageId& lang, std::string_view line) {
    auto& [unknown, total] = unk[lang.code()];
    for (const auto& w : tokenize_words(line)) {
      ++total;
      unknown += !vocab.find(w).has_value();
    }
  };
  for (const auto& s : corpora.mono) {
    for (const auto& line : s.sentences) count(s.lang, line);
  }
  for (const auto& s : corpora.bitext) {
    for (const auto& p : s.pairs) {
      count(s.direction.src, p.source);
      count(s.direction.tgt, p.target);
    }
  }
  json unk_json = json::object();
  for (const auto& [lang, c] : unk) {
    unk_json[lang] = {{"unk", c.first},
                      {"tokens", c.second},
                      {"rate", c.second == 0 ? 0.0
                                             : static_cast<double>(c.first) /
                                                   static_cast<double>(c.second)}};
  }
  out["unk_rate"] = std::move(unk_json);
  out["vocab_size"] = vocab.size();

  if (empirical_draws > 0) {
    const EmpiricalMix mix = sample_mix(plan, manifest, empirical_draws,
                                        Rng(cfg.sampler.seed).split("stats"));
    std::map<std::string, std::size_t> tasks;
    for (const auto& [t, n] : mix.tasks) tasks[task_key(t)] = n;
    const auto freqs = [](const std::map<std::string, std::size_t>& counts) {
      std::size_t n = 0;
      for (const auto& [k, c] : counts) n += c;
      json j = json::object();
      for (const auto& [k, c] : counts) {
        j[k] = n == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(n);
      }
      return j;
    };
    json e;
    e["draws"] = mix.draws;
    e["task_probs"] = freqs(tasks);
    e["mono_probs"] = freqs(mix.mono);
    e["dict_probs"] = freqs(mix.dict);
    e["bitext_probs"] = freqs(mix.bitext);
    e["tv"] = {{"task_probs", total_variation(tasks, keyed(plan.task_probs))},
               {"mono_probs", total_variation(mix.mono, keyed(plan.mono_probs))},
               {"dict_probs", total_variation(mix.dict, keyed(plan.dict_probs))},
               {"bitext_probs",
                total_variation(mix.bitext, keyed(plan.bitext_probs))}};
    out["empirical"] = std::move(e);
  }
  return out;
}

}  // namespace mixdenoise
