// Copyright 2026 The sevsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// sevsim run <file|builtin> [--design D] [--seed N] [--transcript PATH] [--keyserver-http ADDR]
// sevsim list
// sevsim replay <PATH>
//
// Exit codes: 0 pass, 1 scenario fail, 2 config error.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "sevsim/sevsim.h"

namespace {

constexpr int kExitConfig = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int report_error(sevsim_status st) {
  std::cerr << "sevsim: " << sevsim_last_error() << "\n";
  return st == SEVSIM_ERR_CONFIG || st == SEVSIM_ERR_INVALID_ARGUMENT || st == SEVSIM_ERR_NOT_FOUND
             ? kExitConfig
             : 1;
}

int finish(sevsim_verdict* v, const std::string& transcript_path) {
  std::cout << sevsim_verdict_text(v);
  int code = sevsim_verdict_exit_code(v);
  if (!transcript_path.empty()) {
    std::ofstream out(transcript_path, std::ios::binary);
    out << sevsim_verdict_transcript(v);
    if (!out) {
      std::cerr << "sevsim: cannot write transcript to " << transcript_path << "\n";
      code = 1;
    }
  }
  sevsim_verdict_free(v);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale SEV remote attestation simulator"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List built-in scenarios");

  std::string target;
  std::string design;
  std::optional<std::uint64_t> seed;
  std::string transcript_path;
  std::string keyserver_http;
  auto* run = app.add_subcommand("run", "Run a scenario file or built-in");
  run->add_option("scenario", target, "Scenario JSON file or built-in name")->required();
  run->add_option("--design", design, "Override the design")
      ->check(CLI::IsMember({"baseline", "enhanced"}));
  run->add_option("--seed", seed, "Override the seed");
  run->add_option("--transcript", transcript_path, "Write the transcript here");
  run->add_option("--keyserver-http", keyserver_http,
                  "Serve the key server over HTTP on host:port and query it there");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-run a recorded transcript and compare");
  replay->add_option("transcript", replay_path, "Transcript file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (*list) {
    for (size_t i = 0; i < sevsim_builtin_count(); ++i) std::cout << sevsim_builtin_name(i) << "\n";
    return 0;
  }

  if (*run) {
    std::string config;
    if (auto text = read_file(target)) {
      config = *text;
    } else {
      char* json = nullptr;
      sevsim_status st = sevsim_builtin_config(target.c_str(), &json);
      if (st != SEVSIM_OK) {
        std::cerr << "sevsim: '" << target << "' is neither a readable file nor a built-in\n";
        return kExitConfig;
      }
      config = json;
      sevsim_string_free(json);
    }
    sevsim_run_options opts{};
    opts.design = design.empty() ? nullptr : design.c_str();
    opts.has_seed = seed.has_value() ? 1 : 0;
    opts.seed = seed.value_or(0);
    opts.keyserver_http = keyserver_http.empty() ? nullptr : keyserver_http.c_str();
    sevsim_verdict* v = nullptr;
    sevsim_status st = sevsim_run(config.c_str(), &opts, &v);
    if (st != SEVSIM_OK) return report_error(st);
    return finish(v, transcript_path);
  }

  auto text = read_file(replay_path);
  if (!text) {
    std::cerr << "sevsim: cannot read " << replay_path << "\n";
    return kExitConfig;
  }
  sevsim_verdict* v = nullptr;
  sevsim_status st = sevsim_replay(text->c_str(), &v);
  if (st != SEVSIM_OK) return report_error(st);
  return finish(v, "");
}
