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

#include "caprank/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>

#include "caprank/error.hpp"
#include "caprank/external_expert.hpp"
#include "caprank/log.hpp"

namespace caprank::cli {

namespace {

struct HelpRequested : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

std::vector<ExpertId> parse_experts(const std::string& csv) {
  std::vector<ExpertId> out;
  for (const auto& name : split_csv(csv)) {
    std::optional<ExpertId> id;
    if (name == "none") continue;
    if (name == "word") id = ExpertId::kWord;
    else if (name == "sentence") id = ExpertId::kSentenceBuiltin;
    else if (name == "external") id = ExpertId::kSentenceExternal;
    else id = parse_expert_name(name);
    if (!id) throw DataError("--experts: unknown expert '" + name + "'");
    if (std::find(out.begin(), out.end(), *id) == out.end()) out.push_back(*id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string experts_flag(const std::vector<ExpertId>& ids) {
  if (ids.empty()) return "none";
  std::string out;
  for (auto id : ids) {
    if (!out.empty()) out += ",";
    out += id == ExpertId::kWord ? "word" : id == ExpertId::kSentenceBuiltin ? "sentence" : "external";
  }
  return out;
}

std::vector<double> parse_bins(const std::string& csv) {
  std::vector<double> out;
  for (const auto& f : split_csv(csv)) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size()) {
      throw DataError("--bins: '" + f + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw DataError("--bins: no edges given");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw DataError("--bins: edges must increase strictly");
  }
  return out;
}

std::string bins_flag(const std::vector<double>& bins) {
  std::string out;
  for (double b : bins) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, b);
    if (!out.empty()) out += ",";
    out.append(buf, ptr);
  }
  return out;
}

// Fills every option of `app` that the command line left unset from the
// JSON object in `path`.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("--config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("--config: " + path + ": " + e.what());
  }
  if (!j.is_object()) throw DataError("--config: " + path + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "config") continue;
    auto* opt = app.get_option_no_throw("--" + key);
    if (!opt) throw DataError("--config: unknown key \"" + key + "\" for " + app.get_name());
    if (opt->count() > 0) continue;
    std::vector<std::string> results;
    auto to_string = [](const nlohmann::json& v) {
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + to_string(v);
      results.push_back(joined);
    } else {
      results.push_back(to_string(value));
    }
    opt->add_result(results);
    opt->run_callback();
  }
}

struct Flags {
  std::string experts = "word";
  std::string prior = "softmax";
  std::string external_cmd;
  std::string use = "winner";
  std::string bins = "0,0.4,0.8";
  std::string bleu_smooth = "none";
  std::string config;
  bool strict = true;
};

void add_path(CLI::App* app, RunConfig& cfg, const std::string& role, const std::string& help) {
  app->add_option("--" + role, cfg.paths[role], help);
}

std::string require_path(const RunConfig& cfg, const std::string& role, const std::string& why) {
  auto p = cfg.path(role);
  if (p.empty()) throw DataError("--" + role + " is required " + why);
  return p;
}

std::unordered_set<std::string> corpus_vocabulary(const std::vector<CorpusItem>& items) {
  std::unordered_set<std::string> vocab;
  for (const auto& item : items) {
    for (const auto& c : item.beam.candidates) {
      for (auto& t : tokenize(c.text)) vocab.insert(std::move(t));
    }
    for (const auto& o : item.visual.objects) {
      for (auto& t : tokenize(o.label)) vocab.insert(std::move(t));
    }
  }
  return vocab;
}

WordVectorTable load_table(const RunConfig& cfg, const std::vector<CorpusItem>& items) {
  const auto cache = cfg.path("embedding-cache");
  if (!cache.empty() && std::filesystem::exists(cache)) {
    auto table = read_embedding_cache(cache);
    logger()->info("loaded {} vectors from embedding cache {}", table.vocab_size(), cache);
    return table;
  }
  const auto path = require_path(cfg, "embeddings", "when the word or sentence expert is enabled");
  const auto vocab = corpus_vocabulary(items);
  WordVectorTable table;
  try {
    table = load_vectors(path, &vocab);
  } catch (const DataError& e) {
    throw DataError(std::string("--embeddings: ") + e.what());
  }
  if (!cache.empty()) write_embedding_cache(table, cache);
  return table;
}

struct Hypotheses {
  std::string system;
  std::vector<std::pair<std::string, std::string>> captions;  // image_id, text
};

std::vector<Hypotheses> load_hypotheses(const RunConfig& cfg) {
  std::vector<Hypotheses> systems;
  const auto hyps = cfg.path("hyps");
  const auto reranked = cfg.path("reranked");
  if (hyps.empty() == reranked.empty()) {
    throw DataError("exactly one of --hyps or --reranked is required");
  }
  if (!hyps.empty()) {
    Hypotheses h{"hypothesis", {}};
    for (auto& r : read_references(hyps)) {
      if (r.references.size() != 1) {
        throw DataError(hyps + ": image '" + r.image_id + "' must carry exactly one hypothesis");
      }
      h.captions.emplace_back(r.image_id, std::move(r.references.front()));
    }
    if (h.captions.empty()) throw DataError(hyps + ": no hypotheses");
    systems.push_back(std::move(h));
    return systems;
  }
  const auto results = read_rerank_results(reranked);
  if (results.empty()) throw DataError(reranked + ": no re-ranked images");
  for (const auto& use : cfg.use) {
    if (use != "winner" && use != "baseline") {
      throw DataError("--use: expected winner or baseline, got '" + use + "'");
    }
    Hypotheses h{use, {}};
    for (const auto& r : results) {
      h.captions.emplace_back(r.image_id, use == "winner" ? r.winner_text() : r.entries.front().text);
    }
    systems.push_back(std::move(h));
  }
  if (systems.empty()) throw DataError("--use: nothing selected");
  return systems;
}

std::vector<EvalPair> pair_with_references(const Hypotheses& h,
                                           const std::unordered_map<std::string, const ReferenceSet*>& refs,
                                           JoinMode mode) {
  std::vector<EvalPair> pairs;
  std::vector<std::string> missing;
  for (const auto& [id, text] : h.captions) {
    auto it = refs.find(id);
    if (it == refs.end()) {
      missing.push_back(id);
      continue;
    }
    EvalPair p{id, tokenize(text), {}};
    for (const auto& r : it->second->references) p.references.push_back(tokenize(r));
    pairs.push_back(std::move(p));
  }
  if (!missing.empty()) {
    if (mode == JoinMode::kStrict) {
      std::string ids;
      for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
      throw DataError("no references for " + std::to_string(missing.size()) + " image(s): " + ids);
    }
    logger()->warn("skipped {} image(s) with no references", missing.size());
  }
  if (pairs.empty()) throw DataError("no hypothesis could be matched with references");
  return pairs;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  auto nonempty = [](const std::map<std::string, std::string>& m) {
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : m) {
      if (!v.empty()) out.emplace(k, v);
    }
    return out;
  };
  return subcommand == o.subcommand && nonempty(paths) == nonempty(o.paths) &&
         fusion == o.fusion && expert == o.expert && strictness == o.strictness &&
         jobs == o.jobs && beam_cap == o.beam_cap && use == o.use && bins == o.bins &&
         bleu_smoothing == o.bleu_smoothing;
}

std::string RunConfig::path(const std::string& role) const {
  auto it = paths.find(role);
  return it == paths.end() ? std::string() : it->second;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  Flags flags;

  CLI::App app{"Visual re-ranking of beam-search captions and caption evaluation", "caprank"};
  app.require_subcommand(1);

  auto* rerank = app.add_subcommand("rerank", "Re-rank beams against their visual context");
  add_path(rerank, cfg, "beams", "beams.jsonl input");
  add_path(rerank, cfg, "visual", "visual.jsonl input");
  add_path(rerank, cfg, "out", "reranked.jsonl output");
  add_path(rerank, cfg, "embeddings", "word vectors in text format");
  add_path(rerank, cfg, "embedding-cache", "binary snapshot of the filtered vectors (read if present, else written)");
  add_path(rerank, cfg, "cache", "external expert score cache (JSONL)");
  add_path(rerank, cfg, "stopwords", "replacement stopword list, one word per line");
  rerank->add_option("--experts", flags.experts, "csv of word,sentence,external or none")
      ->capture_default_str();
  rerank->add_option("--external-cmd", flags.external_cmd, "external expert adapter command line");
  rerank->add_option("--visual-slot", cfg.fusion.visual_slot, "visual object slot to score (1 = most confident)")
      ->capture_default_str();
  rerank->add_flag("--slot-max", cfg.fusion.slot_max, "keep each candidate's best product over all slots");
  rerank->add_option("--keyphrases", cfg.expert.keyphrase_count, "keyphrases per caption")
      ->capture_default_str();
  rerank->add_option("--prior", flags.prior, "hypothesis prior: softmax or uniform")->capture_default_str();
  rerank->add_flag("--include-prior", cfg.fusion.include_prior_factor, "multiply the prior into the product");
  rerank->add_option("--epsilon", cfg.fusion.epsilon_floor, "floor applied to every product factor")
      ->capture_default_str();
  rerank->add_option("--timeout-ms", cfg.expert.timeout_ms, "external expert timeout per request")
      ->capture_default_str();
  rerank->add_option("--beam-cap", cfg.beam_cap, "candidates kept per beam")->capture_default_str();
  rerank->add_flag("--strict,!--lenient", flags.strict, "fail (strict) or skip (lenient) on unmatched images");
  rerank->add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
  rerank->add_option("--config", flags.config, "JSON file of flag values");

  auto* evaluate = app.add_subcommand("evaluate", "Score captions against references");
  add_path(evaluate, cfg, "refs", "refs.jsonl");
  add_path(evaluate, cfg, "hyps", "hypotheses in refs.jsonl layout (one caption per image)");
  add_path(evaluate, cfg, "reranked", "reranked.jsonl from rerank");
  add_path(evaluate, cfg, "csv", "also write the report as CSV");
  evaluate->add_option("--use", flags.use, "with --reranked: winner, baseline, or both (csv)")
      ->capture_default_str();
  evaluate->add_option("--bleu-smooth", flags.bleu_smooth, "none or add1")->capture_default_str();
  evaluate->add_flag("--strict,!--lenient", flags.strict, "fail (strict) or skip (lenient) on unmatched images");
  evaluate->add_option("--config", flags.config, "JSON file of flag values");

  auto* div = app.add_subcommand("diversity", "Lexical diversity of captions");
  add_path(div, cfg, "hyps", "captions in refs.jsonl layout");
  add_path(div, cfg, "reranked", "reranked.jsonl from rerank");
  add_path(div, cfg, "csv", "also write the report as CSV");
  div->add_option("--use", flags.use, "with --reranked: winner or baseline")->capture_default_str();
  div->add_option("--config", flags.config, "JSON file of flag values");

  auto* report = app.add_subcommand("report", "Probability-change histogram of a re-ranking");
  add_path(report, cfg, "reranked", "reranked.jsonl from rerank");
  add_path(report, cfg, "out", "changes.csv output");
  add_path(report, cfg, "winners", "per-image winner listing (default: stdout)");
  report->add_option("--bins", flags.bins, "strictly increasing bin edges (csv)")->capture_default_str();
  report->add_option("--config", flags.config, "JSON file of flag values");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  }

  CLI::App* active = nullptr;
  for (auto* sub : {rerank, evaluate, div, report}) {
    if (sub->parsed()) active = sub;
  }
  if (!flags.config.empty()) apply_config_file(*active, flags.config);

  if (active == rerank) cfg.subcommand = Subcommand::kRerank;
  if (active == evaluate) cfg.subcommand = Subcommand::kEvaluate;
  if (active == div) cfg.subcommand = Subcommand::kDiversity;
  if (active == report) cfg.subcommand = Subcommand::kReport;

  std::erase_if(cfg.paths, [](const auto& kv) { return kv.second.empty(); });
  cfg.fusion.experts = parse_experts(flags.experts);
  if (flags.prior == "softmax") {
    cfg.expert.prior_mode = PriorMode::kBeamSoftmax;
  } else if (flags.prior == "uniform") {
    cfg.expert.prior_mode = PriorMode::kUniform;
  } else {
    throw DataError("--prior: expected softmax or uniform, got '" + flags.prior + "'");
  }
  if (!flags.external_cmd.empty()) cfg.expert.external_command = flags.external_cmd;
  if (auto c = cfg.path("cache"); !c.empty()) cfg.expert.cache_path = c;
  cfg.strictness = flags.strict ? JoinMode::kStrict : JoinMode::kLenient;
  cfg.use = split_csv(flags.use);
  cfg.bins = parse_bins(flags.bins);
  if (flags.bleu_smooth == "none") {
    cfg.bleu_smoothing = BleuSmoothing::kNone;
  } else if (flags.bleu_smooth == "add1") {
    cfg.bleu_smoothing = BleuSmoothing::kAdd1;
  } else {
    throw DataError("--bleu-smooth: expected none or add1, got '" + flags.bleu_smooth + "'");
  }
  if (cfg.jobs < 1) throw DataError("--jobs must be >= 1");
  if (cfg.beam_cap < 1) throw DataError("--beam-cap must be >= 1");
  try {
    cfg.expert.validate();
    if (cfg.subcommand == Subcommand::kRerank) cfg.fusion.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return cfg;
}

nlohmann::ordered_json to_config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  for (const auto& [role, path] : cfg.paths) {
    if (!path.empty()) j[role] = path;
  }
  switch (cfg.subcommand) {
    case Subcommand::kRerank:
      j["experts"] = experts_flag(cfg.fusion.experts);
      if (cfg.expert.external_command) j["external-cmd"] = *cfg.expert.external_command;
      j["visual-slot"] = cfg.fusion.visual_slot;
      j["slot-max"] = cfg.fusion.slot_max;
      j["keyphrases"] = cfg.expert.keyphrase_count;
      j["prior"] = cfg.expert.prior_mode == PriorMode::kUniform ? "uniform" : "softmax";
      j["include-prior"] = cfg.fusion.include_prior_factor;
      j["epsilon"] = cfg.fusion.epsilon_floor;
      j["timeout-ms"] = cfg.expert.timeout_ms;
      j["beam-cap"] = cfg.beam_cap;
      j["strict"] = cfg.strictness == JoinMode::kStrict;
      j["jobs"] = cfg.jobs;
      break;
    case Subcommand::kEvaluate:
      j["use"] = cfg.use;
      j["bleu-smooth"] = cfg.bleu_smoothing == BleuSmoothing::kAdd1 ? "add1" : "none";
      j["strict"] = cfg.strictness == JoinMode::kStrict;
      break;
    case Subcommand::kDiversity:
      j["use"] = cfg.use;
      break;
    case Subcommand::kReport:
      j["bins"] = bins_flag(cfg.bins);
      break;
  }
  return j;
}

int cmd_rerank(const RunConfig& cfg, std::ostream& out) {
  const auto beams_path = require_path(cfg, "beams", "for rerank");
  const auto visual_path = require_path(cfg, "visual", "for rerank");
  const auto out_path = require_path(cfg, "out", "for rerank");

  const auto beams = read_beams(beams_path, cfg.beam_cap);
  const auto visual = read_visual(visual_path);
  const auto joined = join_corpus(beams, visual, cfg.strictness);
  const auto& items = joined.items;

  std::optional<WordVectorTable> table;
  if (cfg.fusion.uses(ExpertId::kWord) || cfg.fusion.uses(ExpertId::kSentenceBuiltin)) {
    table = load_table(cfg, items);
  }
  std::optional<StopwordList> custom_stopwords;
  if (auto p = cfg.path("stopwords"); !p.empty()) custom_stopwords = StopwordList::load(p);
  const StopwordList* stopwords = custom_stopwords ? &*custom_stopwords : &StopwordList::english();

  std::unique_ptr<ScoreCache> cache;
  if (cfg.expert.cache_path) cache = std::make_unique<ScoreCache>(*cfg.expert.cache_path);

  const std::size_t n = items.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(cfg.jobs, n));

  std::vector<ExternalExpertClient> clients;
  if (cfg.fusion.uses(ExpertId::kSentenceExternal)) {
    if (!cfg.expert.external_command) {
      throw DataError("--external-cmd is required when the external expert is enabled");
    }
    for (std::size_t w = 0; w < workers; ++w) {
      clients.push_back(ExternalExpertClient::spawn(*cfg.expert.external_command, cfg.expert.timeout_ms));
    }
  }

  std::vector<ExpertEngine> engines;
  for (std::size_t w = 0; w < workers; ++w) {
    engines.emplace_back(table ? &*table : nullptr, cfg.expert, stopwords, nullptr,
                         clients.empty() ? nullptr : &clients[w], cache.get());
  }

  std::vector<RerankResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto work = [&](ExpertEngine& engine) {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || stop.load()) return;
      try {
        results[i] = rerank_beam(items[i].beam, items[i].visual, engine, cfg.fusion);
      } catch (...) {
        errors[i] = std::current_exception();
        stop.store(true);
      }
    }
  };
  if (workers == 1) {
    work(engines.front());
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, std::ref(engines[w]));
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& c : clients) c.shutdown();

  write_rerank_results(results, out_path);

  std::size_t changed = 0;
  double delta_sum = 0.0;
  for (const auto& r : results) {
    changed += r.winner_changed() ? 1 : 0;
    delta_sum += r.entries[r.winner_index].delta;
  }
  out << "images processed: " << n << "\n";
  if (!joined.skipped.empty()) out << "images skipped: " << joined.skipped.size() << "\n";
  out << "winner changed: " << changed << "\n";
  out << "mean winner delta: " << format_fixed6(n ? delta_sum / static_cast<double>(n) : 0.0) << "\n";
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const auto refs_path = require_path(cfg, "refs", "for evaluate");
  const auto systems = load_hypotheses(cfg);
  const auto refs = read_references(refs_path);
  std::unordered_map<std::string, const ReferenceSet*> by_id;
  for (const auto& r : refs) by_id.emplace(r.image_id, &r);

  std::vector<NamedReport> reports;
  for (const auto& h : systems) {
    const auto pairs = pair_with_references(h, by_id, cfg.strictness);
    reports.emplace_back(h.system, evaluate(pairs, cfg.bleu_smoothing));
  }
  out << format_report_table(reports);
  if (auto csv = cfg.path("csv"); !csv.empty()) write_text_file(csv, format_report_csv(reports));
  return kExitOk;
}

int cmd_diversity(const RunConfig& cfg, std::ostream& out) {
  auto systems = load_hypotheses(cfg);
  if (systems.size() != 1) throw DataError("diversity takes a single --use selection");
  std::vector<Tokens> captions;
  for (const auto& [id, text] : systems.front().captions) captions.push_back(tokenize(text));
  const auto d = diversity(captions);
  out << format_diversity_table(d, captions.size());
  if (auto csv = cfg.path("csv"); !csv.empty()) {
    write_text_file(csv, format_diversity_csv(d, captions.size()));
  }
  return kExitOk;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const auto reranked = require_path(cfg, "reranked", "for report");
  const auto out_path = require_path(cfg, "out", "for report");
  const auto results = read_rerank_results(reranked);
  write_text_file(out_path, format_changes_csv(bin_probability_changes(results, cfg.bins)));

  std::string listing = "image_id,winner_index,changed,winner_delta\n";
  for (const auto& r : results) {
    listing += r.image_id + "," + std::to_string(r.winner_index) + "," +
               (r.winner_changed() ? "1" : "0") + "," +
               format_fixed6(r.entries[r.winner_index].delta) + "\n";
  }
  if (auto winners = cfg.path("winners"); !winners.empty()) {
    write_text_file(winners, listing);
  } else {
    out << listing;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = parse_args(args);
    switch (cfg.subcommand) {
      case Subcommand::kRerank: return cmd_rerank(cfg, out);
      case Subcommand::kEvaluate: return cmd_evaluate(cfg, out);
      case Subcommand::kDiversity: return cmd_diversity(cfg, out);
      case Subcommand::kReport: return cmd_report(cfg, out);
    }
    return kExitInternal;
  } catch (const HelpRequested& help) {
    out << help.what();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "caprank: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    err << "caprank: " << e.what() << "\n";
    return kExitData;
  } catch (const AdapterError& e) {
    err << "caprank: " << e.what() << "\n";
    return kExitAdapter;
  } catch (const std::exception& e) {
    err << "caprank: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace caprank::cli
