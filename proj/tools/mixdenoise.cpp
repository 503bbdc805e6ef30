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

// mixdenoise: build-vocab | stats | emit | verify.
//
// Exit codes: 0 success, 1 data error or failed verification, 2 bad usage or
// configuration.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mixdenoise/error.hpp"
#include "mixdenoise/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mixdenoise;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  bool trace = false;
  std::vector<std::string> tasks;
  std::optional<std::size_t> max_pairs;
  std::optional<std::size_t> records;
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config,-c", o.config, "JSON config file")->required();
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--tasks", o.tasks, "tasks to mix: mono dict bitext")
      ->check(CLI::IsMember({"mono", "dict", "bitext"}));
  cmd->add_option("--max-pairs", o.max_pairs, "keep at most N pairs per bitext file");
}

PipelineConfig configure(const Overrides& o) {
  PipelineConfig cfg = load_config(o.config);
  if (o.seed) cfg.sampler.seed = *o.seed;
  if (!o.tasks.empty()) {
    cfg.sampler.tasks.clear();
    for (const auto& t : o.tasks) cfg.sampler.tasks.push_back(parse_task(t));
  }
  if (o.max_pairs) cfg.bitext_options.max_pairs = *o.max_pairs;
  if (o.records) cfg.num_records = *o.records;
  if (o.trace) cfg.record.trace = true;
  return cfg;
}

unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilingual denoising data pipeline"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--jobs,-j", o.jobs, "worker threads (default: all cores)");

  auto* vocab_cmd = app.add_subcommand("build-vocab", "build and write the vocabulary");
  add_config_flags(vocab_cmd, o);
  std::string vocab_out;
  vocab_cmd->add_option("--output,-o", vocab_out,
                        "output file (default: the config's vocab path)");

  auto* stats_cmd = app.add_subcommand("stats", "print corpus sizes and the mix plan");
  add_config_flags(stats_cmd, o);
  std::size_t empirical = 0;
  stats_cmd->add_option("--empirical", empirical,
                        "add frequencies from N simulated draws");

  auto* emit_cmd = app.add_subcommand("emit", "write batch files and a manifest");
  add_config_flags(emit_cmd, o);
  std::string emit_out;
  bool force = false;
  emit_cmd->add_option("--output,-o", emit_out, "output directory");
  emit_cmd->add_option("--records,-n", o.records, "number of records");
  emit_cmd->add_flag("--trace", o.trace, "keep noise traces in the records");
  emit_cmd->add_flag("--force", force, "replace an existing emission");

  auto* verify_cmd = app.add_subcommand("verify", "re-check an emitted directory");
  std::string verify_dir;
  bool as_json = false;
  verify_cmd->add_option("dir", verify_dir, "emitted directory")->required();
  verify_cmd->add_flag("--json", as_json, "print the report as JSON");

  for (auto* cmd : {vocab_cmd, stats_cmd, emit_cmd, verify_cmd}) {
    cmd->add_option("--jobs,-j", o.jobs, "worker threads (default: all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const unsigned jobs = resolve_jobs(o.jobs);
  try {
    if (*vocab_cmd) {
      const PipelineConfig cfg = configure(o);
      const fs::path out = !vocab_out.empty() ? fs::path(vocab_out)
                           : cfg.vocab_path ? *cfg.vocab_path
                                            : fs::path("vocab.json");
      const Corpora corpora = load_corpora(cfg, jobs, false);
      const Vocab vocab = build_vocab_for(cfg, corpora);
      std::ofstream file(out, std::ios::binary | std::ios::trunc);
      file << vocab.to_json();
      if (!file) throw DataError("cannot write '" + out.string() + "'");
      std::cout << "wrote " << vocab.size() << " tokens to " << out.string()
                << '\n';
    } else if (*stats_cmd) {
      std::cout << stats(configure(o), empirical, jobs).dump(2) << '\n';
    } else if (*emit_cmd) {
      const PipelineConfig cfg = configure(o);
      const fs::path out = emit_out.empty() ? cfg.output : fs::path(emit_out);
      const EmitSummary s = emit(cfg, out, jobs, force);
      std::cout << "wrote " << s.records << " records (" << s.tokens
                << " tokens) in " << s.batches << " batches to " << out.string()
                << '\n';
      for (const auto& [task, n] : s.task_counts) {
        std::cout << "  " << to_string(task) << ": " << n << '\n';
      }
    } else if (*verify_cmd) {
      const VerifyReport report = verify(verify_dir, jobs);
      if (as_json) {
        std::cout << report.to_json().dump(2) << '\n';
      } else {
        std::cout << report.to_text();
      }
      return report.passed() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "mixdenoise: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mixdenoise: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
