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

#include "fixture.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "mixdenoise/rng.hpp"

namespace mixdenoise::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  path_ = fs::temp_directory_path() /
          ("mixdenoise-test-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, std::string_view text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

namespace {

// Skewed word choice so the vocabulary has a frequency ranking.
std::size_t draw_word(Rng& rng, std::size_t lexicon) {
  const double u = rng.uniform();
  return static_cast<std::size_t>(u * u * static_cast<double>(lexicon));
}

std::vector<std::size_t> draw_sentence(Rng& rng, const SyntheticSpec& spec,
                                       std::size_t length) {
  std::vector<std::size_t> out(length);
  for (auto& w : out) w = draw_word(rng, spec.lexicon);
  return out;
}

std::string render(const std::string& lang, const std::vector<std::size_t>& ids) {
  std::string line;
  for (const std::size_t i : ids) {
    if (!line.empty()) line += ' ';
    line += lang + std::to_string(i);
  }
  return line + " .";
}

}  // namespace

nlohmann::json make_synthetic_corpus(const fs::path& dir,
                                     const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  nlohmann::json cfg;
  cfg["languages"] = spec.languages;
  cfg["mono"] = nlohmann::json::array();
  cfg["bitext"] = nlohmann::json::array();
  const auto length = [&] {
    return spec.min_words + rng.uniform_index(spec.max_words - spec.min_words + 1);
  };

  for (const auto& [lang, n] : spec.mono) {
    std::string text;
    for (std::size_t i = 0; i < n; ++i) {
      text += render(lang, draw_sentence(rng, spec, length())) + "\n";
      if (spec.long_every > 0 && i % spec.long_every == spec.long_every - 1) {
        text += render(lang, draw_sentence(rng, spec, spec.long_words)) + "\n";
      }
    }
    const std::string name = "mono." + lang + ".txt";
    write_file(dir / name, text);
    cfg["mono"].push_back({{"path", name}, {"lang", lang}});
  }

  for (const auto& [key, n] : spec.bitext) {
    const std::string src = key.substr(0, key.find('-'));
    const std::string tgt = key.substr(key.find('-') + 1);
    std::string text;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ids = draw_sentence(rng, spec, length());
      text += render(src, ids) + "\t" + render(tgt, ids) + "\n";
    }
    const std::string name = "bitext." + key + ".tsv";
    write_file(dir / name, text);
    cfg["bitext"].push_back({{"path", name}, {"src", src}, {"tgt", tgt}});
  }

  if (spec.dictionaries) {
    for (const auto& a : spec.languages) {
      for (const auto& b : spec.languages) {
        if (a == b) continue;
        std::string text;
        for (std::size_t i = 0; i < spec.lexicon; ++i) {
          text += a + std::to_string(i) + "\t" + b + std::to_string(i) + "\n";
        }
        write_file(dir / "dict" / (a + "-" + b + ".txt"), text);
      }
    }
    cfg["dictionary_dir"] = "dict";
  } else {
    cfg["tasks"] = {"mono", "bitext"};
  }
  cfg["vocab_size"] = 4096;
  cfg["max_len"] = 64;
  cfg["token_budget"] = 1024;
  cfg["records"] = 500;
  cfg["seed"] = 5;
  write_file(dir / "config.json", cfg.dump(2));
  return cfg;
}

}  // namespace mixdenoise::testing
