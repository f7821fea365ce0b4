/*
Copyright 2026 the medsim authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "medsim/text_sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "medsim/text_util.hpp"

namespace medsim::textsim {

namespace {

const std::set<std::string>& stopword_set() {
  static const std::set<std::string> words(stopword_list().begin(),
                                           stopword_list().end());
  return words;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (auto& raw : text::split_alnum_lower(text)) {
    if (raw.code_points < 2) continue;
    if (stopword_set().count(raw.text)) continue;
    tokens.push_back(std::move(raw.text));
  }
  return tokens;
}

std::vector<std::string> keywords(std::span<const std::string> tokens) {
  std::vector<std::string> result;
  std::set<std::string> seen;
  for (const auto& t : tokens)
    if (seen.insert(t).second) result.push_back(t);
  return result;
}

Bm25Index Bm25Index::build(const kg::Store& store, Bm25Params params) {
  if (params.k1 < 0.0)
    fail(errc::config_error, "bm25 k1 must be >= 0");
  if (params.b < 0.0 || params.b > 1.0)
    fail(errc::config_error, "bm25 b must be in [0,1]");

  Bm25Index index;
  index.params_ = params;

  size_t total_length = 0;
  for (const auto& drug : store.drugs()) {
    std::vector<std::string> tokens = tokenize(drug.description);
    if (tokens.empty()) continue;  // empty descriptions never enter the index

    Doc doc;
    doc.length = tokens.size();
    doc.keywords = keywords(tokens);
    for (const auto& t : tokens) ++doc.term_frequency[t];
    for (const auto& [term, tf] : doc.term_frequency) {
      (void)tf;
      ++index.term_df_[term];
    }
    total_length += doc.length;
    index.docs_.emplace(drug.id, std::move(doc));
  }
  if (!index.docs_.empty())
    index.avgdl_ = static_cast<double>(total_length) /
                   static_cast<double>(index.docs_.size());
  return index;
}

double Bm25Index::term_idf(const std::string& term) const {
  auto it = term_df_.find(term);
  const double n = it == term_df_.end() ? 0.0 : static_cast<double>(it->second);
  const double total = static_cast<double>(docs_.size());
  return std::log(1.0 + (total - n + 0.5) / (n + 0.5));
}

bool Bm25Index::has_document(const std::string& drug_id) const {
  return docs_.count(drug_id) != 0;
}

const Bm25Index::Doc& Bm25Index::document(const std::string& drug_id) const {
  auto it = docs_.find(drug_id);
  if (it == docs_.end())
    fail(errc::empty_description,
         "drug '" + drug_id + "' has no description tokens");
  return it->second;
}

nlohmann::json Bm25Index::to_json() const {
  nlohmann::json j;
  j["k1"] = params_.k1;
  j["b"] = params_.b;
  j["avgdl"] = avgdl_;
  j["doc_count"] = docs_.size();
  j["stopword_hash"] = stopword_hash();
  nlohmann::json dfs = nlohmann::json::object();
  for (const auto& [term, df] : term_df_) dfs[term] = df;
  j["term_df"] = std::move(dfs);
  return j;
}

double bm25_score(const Bm25Index& index, const std::string& drug1,
                  const std::string& drug2) {
  const Bm25Index::Doc& query = index.document(drug1);
  const Bm25Index::Doc& doc = index.document(drug2);

  const double k1 = index.params().k1;
  const double b = index.params().b;
  const double len_ratio = static_cast<double>(doc.length) / index.avgdl();

  double score = 0.0;
  for (const auto& term : query.keywords) {
    auto it = doc.term_frequency.find(term);
    if (it == doc.term_frequency.end()) continue;
    const double tf = static_cast<double>(it->second);
    score += index.term_idf(term) * tf * (k1 + 1.0) /
             (tf + k1 * (1.0 - b + b * len_ratio));
  }
  return score;
}

std::vector<std::string> Bm25Index::doc_ids() const {
  std::vector<std::string> ids;
  ids.reserve(docs_.size());
  for (const auto& [id, doc] : docs_) {
    (void)doc;
    ids.push_back(id);
  }
  return ids;
}

ScoreBounds compute_bounds(const Bm25Index& index) {
  ScoreBounds bounds;
  const std::vector<std::string> ids = index.doc_ids();
  bool first = true;
  for (const auto& a : ids) {
    for (const auto& b : ids) {
      if (a == b) continue;  // self-pairs would dominate the max
      double s = bm25_score(index, a, b);
      if (first) {
        bounds.min = bounds.max = s;
        first = false;
      } else {
        bounds.min = std::min(bounds.min, s);
        bounds.max = std::max(bounds.max, s);
      }
    }
  }
  return bounds;
}

double ksts(const Bm25Index& index, const std::string& drug1, const std::string& drug2,
            const ScoreBounds& bounds, const DiagnosticSink& sink) {
  if (bounds.degenerate()) {
    emit_diagnostic(sink, "degenerate BM25 score bounds (max == min); ksts = 0.5");
    return 0.5;
  }
  double value = (bm25_score(index, drug1, drug2) - bounds.min) /
                 (bounds.max - bounds.min);
  return std::clamp(value, 0.0, 1.0);
}

std::optional<double> ksts_symmetric(const Bm25Index& index, const std::string& drug1,
                                     const std::string& drug2, const ScoreBounds& bounds,
                                     const DiagnosticSink& sink) {
  if (!index.has_document(drug1) || !index.has_document(drug2)) return std::nullopt;
  return 0.5 * (ksts(index, drug1, drug2, bounds, sink) +
                ksts(index, drug2, drug1, bounds, sink));
}

}  // namespace medsim::textsim
