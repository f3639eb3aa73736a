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

#include "caprank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "caprank/error.hpp"
#include "caprank/log.hpp"

namespace caprank {

namespace {

constexpr int kMaxN = 4;

std::size_t closest_ref_length(std::size_t hyp_len, const std::vector<Tokens>& refs) {
  std::size_t best = refs.front().size();
  for (const auto& r : refs) {
    const auto d = r.size() > hyp_len ? r.size() - hyp_len : hyp_len - r.size();
    const auto bd = best > hyp_len ? best - hyp_len : hyp_len - best;
    if (d < bd || (d == bd && r.size() < best)) best = r.size();
  }
  return best;
}

using SparseVec = std::unordered_map<std::string, double>;

double sparse_norm(const SparseVec& v) {
  double s = 0.0;
  for (const auto& [k, x] : v) s += x * x;
  return std::sqrt(s);
}

double sparse_cosine(const SparseVec& a, double norm_a, const SparseVec& b, double norm_b) {
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  double dot = 0.0;
  for (const auto& [k, x] : small) {
    if (auto it = large.find(k); it != large.end()) dot += x * it->second;
  }
  return std::clamp(dot / (norm_a * norm_b), 0.0, 1.0);
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::vector<std::pair<std::string, std::vector<std::string>>> report_rows(
    const std::vector<NamedReport>& reports) {
  std::vector<std::pair<std::string, std::vector<std::string>>> rows = {
      {"bleu_1", {}}, {"bleu_2", {}}, {"bleu_3", {}}, {"bleu_4", {}}, {"rouge_l", {}},
      {"cider", {}},  {"voc", {}},    {"ttr", {}},    {"uniq", {}},   {"wpc", {}},
      {"n_images", {}}};
  for (const auto& [name, r] : reports) {
    const std::string values[] = {format_fixed6(r.bleu[0]),
                                  format_fixed6(r.bleu[1]),
                                  format_fixed6(r.bleu[2]),
                                  format_fixed6(r.bleu[3]),
                                  format_fixed6(r.rouge_l),
                                  format_fixed6(r.cider),
                                  std::to_string(r.diversity.voc),
                                  format_fixed6(r.diversity.ttr),
                                  format_fixed6(r.diversity.uniq),
                                  format_fixed6(r.diversity.wpc),
                                  std::to_string(r.n_images)};
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].second.push_back(values[i]);
  }
  return rows;
}

}  // namespace

BleuCounts bleu_counts(std::span<const EvalPair> pairs) {
  BleuCounts c;
  for (const auto& p : pairs) {
    if (p.references.empty()) throw DataError("image '" + p.image_id + "' has no references");
    c.hypothesis_length += static_cast<double>(p.hypothesis.size());
    c.reference_length += static_cast<double>(closest_ref_length(p.hypothesis.size(), p.references));
    for (int n = 1; n <= kMaxN; ++n) {
      const auto hyp = ngrams(p.hypothesis, n);
      std::unordered_map<std::string, int> max_ref;
      for (const auto& ref : p.references) {
        for (const auto& [g, count] : ngrams(ref, n)) {
          auto& m = max_ref[g];
          m = std::max(m, count);
        }
      }
      double matched = 0.0, total = 0.0;
      for (const auto& [g, count] : hyp) {
        total += count;
        if (auto it = max_ref.find(g); it != max_ref.end()) matched += std::min(count, it->second);
      }
      c.matches[n - 1] += matched;
      c.totals[n - 1] += total;
    }
  }
  return c;
}

std::array<double, 4> corpus_bleu(std::span<const EvalPair> pairs, BleuSmoothing smoothing) {
  std::array<double, 4> bleu{};
  if (pairs.empty()) return bleu;
  const auto c = bleu_counts(pairs);
  if (c.hypothesis_length == 0.0) return bleu;

  const double log_bp = c.hypothesis_length < c.reference_length
                            ? 1.0 - c.reference_length / c.hypothesis_length
                            : 0.0;
  double log_sum = 0.0;
  bool zero = false;
  for (int n = 0; n < kMaxN; ++n) {
    double m = c.matches[n], t = c.totals[n];
    if (smoothing == BleuSmoothing::kAdd1 && n > 0) {
      m += 1.0;
      t += 1.0;
    }
    if (m == 0.0 || t == 0.0) zero = true;
    if (!zero) log_sum += std::log(m / t);
    bleu[n] = zero ? 0.0 : std::exp(log_sum / (n + 1) + log_bp);
  }
  return bleu;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_pair(const EvalPair& pair, double beta) {
  double best = 0.0;
  const double b2 = beta * beta;
  for (const auto& ref : pair.references) {
    const auto lcs = static_cast<double>(lcs_length(pair.hypothesis, ref));
    if (lcs == 0.0) continue;
    const double p = lcs / static_cast<double>(pair.hypothesis.size());
    const double r = lcs / static_cast<double>(ref.size());
    best = std::max(best, (1.0 + b2) * p * r / (r + b2 * p));
  }
  return best;
}

double rouge_l(std::span<const EvalPair> pairs, double beta) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : pairs) sum += rouge_l_pair(p, beta);
  return sum / static_cast<double>(pairs.size());
}

double cider(std::span<const EvalPair> pairs) {
  if (pairs.empty()) return 0.0;
  if (pairs.size() == 1) {
    logger()->warn("CIDEr on a single-image corpus: every IDF weight is 0");
  }
  const double n_images = static_cast<double>(pairs.size());
  const double log_n = std::log(n_images);

  double total = 0.0;
  for (int n = 1; n <= kMaxN; ++n) {
    std::unordered_map<std::string, double> df;
    for (const auto& p : pairs) {
      std::unordered_set<std::string> seen;
      for (const auto& ref : p.references) {
        for (const auto& [g, count] : ngrams(ref, n)) seen.insert(g);
      }
      for (const auto& g : seen) df[g] += 1.0;
    }
    auto tfidf = [&](const Tokens& tokens) {
      SparseVec v;
      for (const auto& [g, count] : ngrams(tokens, n)) {
        auto it = df.find(g);
        const double d = it == df.end() ? 1.0 : std::max(1.0, it->second);
        v.emplace(g, count * (log_n - std::log(d)));
      }
      return v;
    };

    double per_n = 0.0;
    for (const auto& p : pairs) {
      const auto hv = tfidf(p.hypothesis);
      const double hn = sparse_norm(hv);
      double sum = 0.0;
      for (const auto& ref : p.references) {
        const auto rv = tfidf(ref);
        sum += sparse_cosine(hv, hn, rv, sparse_norm(rv));
      }
      per_n += sum / static_cast<double>(p.references.size());
    }
    total += per_n / n_images;
  }
  return 10.0 * total / kMaxN;
}

Diversity diversity(std::span<const Tokens> hypotheses) {
  if (hypotheses.empty()) throw DataError("diversity: no captions");
  Diversity d;
  std::unordered_set<std::string_view> vocab;
  double ttr_sum = 0.0, uniq_sum = 0.0, len_sum = 0.0;
  std::size_t non_empty = 0;
  for (const auto& caption : hypotheses) {
    std::unordered_set<std::string_view> types(caption.begin(), caption.end());
    vocab.insert(types.begin(), types.end());
    uniq_sum += static_cast<double>(types.size());
    len_sum += static_cast<double>(caption.size());
    if (!caption.empty()) {
      ttr_sum += static_cast<double>(types.size()) / static_cast<double>(caption.size());
      ++non_empty;
    }
  }
  if (non_empty == 0) throw DataError("diversity: every caption is empty");
  const double n = static_cast<double>(hypotheses.size());
  d.voc = vocab.size();
  d.ttr = ttr_sum / static_cast<double>(non_empty);
  d.uniq = uniq_sum / n;
  d.wpc = len_sum / n;
  return d;
}

MetricReport evaluate(std::span<const EvalPair> pairs, BleuSmoothing smoothing) {
  if (pairs.empty()) throw DataError("nothing to evaluate");
  MetricReport r;
  r.bleu = corpus_bleu(pairs, smoothing);
  r.rouge_l = rouge_l(pairs);
  r.cider = cider(pairs);
  std::vector<Tokens> hyps;
  hyps.reserve(pairs.size());
  for (const auto& p : pairs) hyps.push_back(p.hypothesis);
  r.diversity = diversity(hyps);
  r.n_images = pairs.size();
  return r;
}

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_report_table(const std::vector<NamedReport>& reports) {
  const auto rows = report_rows(reports);
  std::size_t w0 = 8;
  for (const auto& [name, vals] : rows) w0 = std::max(w0, name.size());
  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < reports.size(); ++c) {
    std::size_t w = reports[c].first.size();
    for (const auto& [name, vals] : rows) w = std::max(w, vals[c].size());
    widths.push_back(w);
  }
  std::string out = pad("metric", w0);
  for (std::size_t c = 0; c < reports.size(); ++c) out += "  " + pad(reports[c].first, widths[c]);
  out += '\n';
  for (const auto& [name, vals] : rows) {
    out += pad(name, w0);
    for (std::size_t c = 0; c < vals.size(); ++c) out += "  " + pad(vals[c], widths[c]);
    out += '\n';
  }
  // Strip trailing padding.
  std::string clean;
  std::size_t start = 0;
  while (start < out.size()) {
    auto nl = out.find('\n', start);
    auto line = out.substr(start, nl - start);
    line.erase(line.find_last_not_of(' ') + 1);
    clean += line + '\n';
    start = nl + 1;
  }
  return clean;
}

std::string format_report_csv(const std::vector<NamedReport>& reports) {
  std::string out = "metric,value\n";
  const auto rows = report_rows(reports);
  for (std::size_t c = 0; c < reports.size(); ++c) {
    const std::string prefix = reports.size() > 1 ? reports[c].first + "." : "";
    for (const auto& [name, vals] : rows) out += prefix + name + "," + vals[c] + "\n";
  }
  return out;
}

std::string format_diversity_table(const Diversity& d, std::size_t captions) {
  std::string out;
  out += "captions  " + std::to_string(captions) + "\n";
  out += "voc       " + std::to_string(d.voc) + "\n";
  out += "ttr       " + format_fixed6(d.ttr) + "\n";
  out += "uniq      " + format_fixed6(d.uniq) + "\n";
  out += "wpc       " + format_fixed6(d.wpc) + "\n";
  return out;
}

std::string format_diversity_csv(const Diversity& d, std::size_t captions) {
  std::string out = "metric,value\n";
  out += "voc," + std::to_string(d.voc) + "\n";
  out += "ttr," + format_fixed6(d.ttr) + "\n";
  out += "uniq," + format_fixed6(d.uniq) + "\n";
  out += "wpc," + format_fixed6(d.wpc) + "\n";
  out += "captions," + std::to_string(captions) + "\n";
  return out;
}

}  // namespace caprank
