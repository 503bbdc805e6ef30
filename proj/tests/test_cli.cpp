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


// Runs the command-line binary end to end.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "fixture.hpp"
#include "json.hpp"
#include "mixdenoise/hash.hpp"

using mixdenoise::testing::read_file;
using mixdenoise::testing::TempDir;
using mixdenoise::testing::write_file;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MIXDENOISE_CLI) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) {
    out.append(buf, n);
  }
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string toy_config() { return std::string(MIXDENOISE_TOY_DIR) + "/config.json"; }

}  // namespace

TEST_CASE("build-vocab writes specials first and is reproducible") {
  TempDir tmp;
  const auto a = tmp / "a.json";
  const auto b = tmp / "b.json";
  const Run r = run("build-vocab --config " + toy_config() + " -o " + a.string());
  INFO(r.out);
  REQUIRE(r.code == 0);
  REQUIRE(run("build-vocab --config " + toy_config() + " -o " + b.string()).code == 0);
  CHECK(read_file(a) == read_file(b));
  const json v = json::parse(read_file(a));
  CHECK(v[0] == "<pad>");
  CHECK(v[1] == "<unk>");
  CHECK(v[2] == "<s>");
  CHECK(v[3] == "</s>");
  CHECK(v[4] == "<mask>");
  CHECK(v[5] == "<lang_en>");
  CHECK(v[6] == "<lang_es>");
  CHECK(v[7] == "<lang_fr>");
}

TEST_CASE("a vocabulary smaller than the specials exits with code 2") {
  TempDir tmp;
  json cfg = json::parse(read_file(toy_config()));
  cfg["vocab_size"] = 5;
  for (auto& m : cfg["mono"]) {
    m["path"] = std::string(MIXDENOISE_TOY_DIR) + "/" + m["path"].get<std::string>();
  }
  for (auto& b : cfg["bitext"]) {
    b["path"] = std::string(MIXDENOISE_TOY_DIR) + "/" + b["path"].get<std::string>();
  }
  cfg["dictionary_dir"] = std::string(MIXDENOISE_TOY_DIR) + "/dict";
  cfg.erase("vocab");
  write_file(tmp / "small.json", cfg.dump());
  const Run r = run("build-vocab --config " + (tmp / "small.json").string() +
                    " -o " + (tmp / "v.json").string());
  CHECK(r.code == 2);
  CHECK(r.out.find("special tokens") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("").code == 2);
  CHECK(run("emit").code == 2);
  CHECK(run("stats --config " + toy_config() + " --tasks nope").code == 2);
  CHECK(run("stats --config /nonexistent/config.json").code == 1);
}

TEST_CASE("stats prints the plan and empirical frequencies") {
  const Run r = run("stats --config " + toy_config() + " --empirical 100000");
  REQUIRE(r.code == 0);
  const json s = json::parse(r.out);
  CHECK(s["plan"]["alpha_mono"] == 0.5);
  CHECK(s["plan"]["alpha_bitext"] == 0.3);
  CHECK(s["plan"]["alpha_task"] == 0.3);
  for (const char* k : {"task_probs", "mono_probs", "dict_probs", "bitext_probs"}) {
    CHECK(s["empirical"]["tv"][k].get<double>() < 0.01);
  }
  const json only = json::parse(
      run("stats --config " + toy_config() + " --tasks mono dict").out);
  CHECK(only["plan"]["task_probs"]["bitext"] == 0.0);
}

TEST_CASE("emit and verify round trip through the binary") {
  TempDir tmp;
  const std::string out = (tmp / "out").string();
  const Run e = run("emit --config " + toy_config() + " -o " + out +
                    " --trace --records 600 --seed 3 --jobs 2");
  INFO(e.out);
  REQUIRE(e.code == 0);
  const Run v = run("verify " + out);
  INFO(v.out);
  CHECK(v.code == 0);
  CHECK(v.out.find("PASS  reconstruction") != std::string::npos);
  const Run vj = run("verify --json " + out);
  CHECK(vj.code == 0);
  const json report = json::parse(vj.out);
  CHECK(report["passed"] == true);
  CHECK(report["checks"].size() == 10);

  // Flags override the config and a second run is identical.
  const std::string again = (tmp / "again").string();
  REQUIRE(run("emit --config " + toy_config() + " -o " + again +
              " --trace --records 600 --seed 3 --jobs 1").code == 0);
  CHECK(mixdenoise::directory_hash(out) == mixdenoise::directory_hash(again));
  const json m = json::parse(read_file(tmp / "out" / "manifest.json"));
  CHECK(m["seed"] == 3);
  CHECK(m["records"] == 600);

  // Refuses to overwrite without --force.
  CHECK(run("emit --config " + toy_config() + " -o " + out).code == 2);
  CHECK(run("emit --config " + toy_config() + " -o " + out + " --force").code == 0);
}

TEST_CASE("verify exits 1 on a corrupted emission") {
  TempDir tmp;
  const std::string out = (tmp / "out").string();
  REQUIRE(run("emit --config " + toy_config() + " -o " + out +
              " --records 200 --tasks mono").code == 0);
  const auto batch = tmp / "out" / "batch-000000.jsonl";
  std::string text = read_file(batch);
  json first = json::parse(text.substr(0, text.find('\n')));
  first["target_ids"][1] = 1;
  write_file(batch, first.dump() + text.substr(text.find('\n')));
  const Run v = run("verify " + out);
  CHECK(v.code == 1);
  CHECK(v.out.find("FAIL  reconstruction") != std::string::npos);
  CHECK(v.out.find("record 0") != std::string::npos);
}
