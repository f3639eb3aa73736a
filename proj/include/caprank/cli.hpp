// Copyright 2026 The caprank Authors. All Rights Reserved.
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

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "caprank/corpus.hpp"
#include "caprank/experts.hpp"
#include "caprank/fusion.hpp"
#include "caprank/metrics.hpp"

namespace caprank::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitData = 2,
  kExitAdapter = 3,
};

enum class Subcommand { kRerank, kEvaluate, kDiversity, kReport };

struct RunConfig {
  Subcommand subcommand = Subcommand::kRerank;
  // Role -> path. Roles are the long flag names: beams, visual, out,
  // embeddings, embedding-cache, cache, stopwords, refs, hyps, reranked,
  // csv, winners.
  std::map<std::string, std::string> paths;
  FusionConfig fusion;
  ExpertConfig expert;
  JoinMode strictness = JoinMode::kStrict;
  int jobs = 1;
  int beam_cap = kDefaultBeamCap;
  std::vector<std::string> use{"winner"};  // winner and/or baseline
  std::vector<double> bins = kDefaultChangeBins;
  BleuSmoothing bleu_smoothing = BleuSmoothing::kNone;

  bool operator==(const RunConfig&) const;
  std::string path(const std::string& role) const;  // "" when unset
};

// Parses argv (args[0] is the program name). Values from --config fill in
// every flag not given on the command line. Throws CLI::ParseError for
// usage errors and DataError for bad values or missing required paths.
RunConfig parse_args(const std::vector<std::string>& args);

// The --config representation of cfg: an object keyed by long flag names.
nlohmann::ordered_json to_config_json(const RunConfig& cfg);

int cmd_rerank(const RunConfig& cfg, std::ostream& out);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out);
int cmd_diversity(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);

// Full entry point: parse, dispatch, and map exceptions to exit codes
// (DataError 2, AdapterError 3, anything else 1). Messages go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace caprank::cli
