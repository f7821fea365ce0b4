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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "medsim/error.hpp"
#include "medsim/kg_store.hpp"

namespace medsim::textsim {

/// Bundled English stopword list; the hash versions tokenizer output so a
/// list change invalidates cached indices.
const std::vector<std::string>& stopword_list();
std::uint64_t stopword_hash();

struct TokenizedDescription {
  std::string drug_id;
  std::vector<std::string> tokens;

  size_t length() const { return tokens.size(); }
};

/// Lowercased alphanumeric runs, stopwords removed, tokens shorter than two
/// code points dropped.
std::vector<std::string> tokenize(std::string_view text);

/// Deduplicated tokens in first-occurrence order.
std::vector<std::string> keywords(std::span<const std::string> tokens);

struct Bm25Params {
  double k1 = 2.0;
  double b = 0.75;
};

class Bm25Index {
public:
  struct Doc {
    std::vector<std::string> keywords;         // query side of the score
    std::map<std::string, int> term_frequency;
    size_t length = 0;                         // token count |D|
  };

  static Bm25Index build(const kg::Store& store, Bm25Params params = {});

  /// ln(1 + (N - n + 0.5) / (n + 0.5)) over description documents.
  double term_idf(const std::string& term) const;

  bool has_document(const std::string& drug_id) const;
  const Doc& document(const std::string& drug_id) const;
  std::vector<std::string> doc_ids() const;

  double avgdl() const { return avgdl_; }
  size_t doc_count() const { return docs_.size(); }
  const Bm25Params& params() const { return params_; }

  nlohmann::json to_json() const;  // cache: term DFs, avgdl, k1, b, stopword hash

private:
  Bm25Params params_;
  double avgdl_ = 0.0;
  std::map<std::string, int> term_df_;
  std::map<std::string, Doc> docs_;  // drugs with nonempty descriptions only
};

/// Eq-style query -> document score: keywords of d1 scored against the
/// description of d2. Throws EmptyDescription when either drug has no
/// description tokens.
double bm25_score(const Bm25Index& index, const std::string& drug1,
                  const std::string& drug2);

struct ScoreBounds {
  double min = 0.0;
  double max = 0.0;

  bool degenerate() const { return !(max > min); }
};

/// Min/max of bm25_score over ordered pairs of drugs with nonempty
/// descriptions, self-pairs excluded.
ScoreBounds compute_bounds(const Bm25Index& index);

/// Min-max normalized BM25 in [0,1]. Degenerate bounds (all pair scores
/// equal) yield 0.5 plus a diagnostic.
double ksts(const Bm25Index& index, const std::string& drug1, const std::string& drug2,
            const ScoreBounds& bounds, const DiagnosticSink& sink = {});

/// Feature value: mean of both directions, MISSING when either description
/// is empty. BM25 is query->document and not symmetric on its own.
std::optional<double> ksts_symmetric(const Bm25Index& index, const std::string& drug1,
                                     const std::string& drug2, const ScoreBounds& bounds,
                                     const DiagnosticSink& sink = {});

}  // namespace medsim::textsim
