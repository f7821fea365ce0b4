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

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "medsim/config.hpp"
#include "medsim/embedding.hpp"
#include "medsim/error.hpp"
#include "medsim/evaluation.hpp"
#include "medsim/ingest.hpp"
#include "medsim/kg_store.hpp"
#include "medsim/regression.hpp"
#include "medsim/sparse_features.hpp"
#include "medsim/text_sim.hpp"

namespace medsim::pipeline {

struct ValidationSummary {
  size_t drugs = 0;
  size_t drugs_without_taxonomy = 0;
  size_t drugs_without_description = 0;
  std::array<size_t, 4> annotations_per_category{};  // unique annotation ids
  size_t taxonomy_nodes = 0;
  size_t taxonomy_edges = 0;
  size_t corpus_documents = 0;
  size_t pairs_kept = 0;
  size_t pairs_excluded = 0;
  size_t association_rows_unknown_drug = 0;

  std::string to_text() const;
};

/// Owns the store plus lazily built feature producers (sparse vectors,
/// BM25 index and bounds, hierarchy/text embeddings). Stage seeds derive
/// from the config master seed. Immutable data, memoized builders.
class Engine {
public:
  explicit Engine(Config cfg, DiagnosticSink sink = {});

  const Config& config() const { return cfg_; }
  const kg::Store& store() const { return *store_; }
  const std::vector<ingest::LabeledPair>& labeled_pairs() const;
  const ingest::PairParseResult& pair_report() const;
  const std::vector<ingest::CorpusDocument>& corpus();

  ValidationSummary validate_summary();

  const textsim::Bm25Index& bm25_index();
  const textsim::ScoreBounds& bm25_bounds();
  const embed::EmbeddingTable& embeddings(embed::Mode mode);
  const sparse::SparseWeightedVector& sparse_vector(size_t drug_index,
                                                    kg::Category category);

  /// One feature row in the given layout; throws UnknownDrugInPair.
  regress::PairFeatureRow feature_row(const std::string& drug_a,
                                      const std::string& drug_b,
                                      const std::vector<std::string>& names,
                                      std::optional<double> gold = std::nullopt);

  /// Labeled rows (config pairs file) in the enabled-feature layout.
  regress::PairFeatureTable features_for_labeled(
      const std::vector<std::string>& names);

  /// All unordered store pairs, no gold.
  regress::PairFeatureTable features_all_pairs(const std::vector<std::string>& names);

private:
  Config cfg_;
  DiagnosticSink sink_;
  std::unique_ptr<kg::Store> store_;
  std::optional<ingest::PairParseResult> pairs_;
  std::optional<std::vector<ingest::CorpusDocument>> corpus_;
  size_t association_rows_unknown_drug_ = 0;

  std::optional<textsim::Bm25Index> bm25_;
  std::optional<textsim::ScoreBounds> bounds_;
  std::optional<embed::EmbeddingTable> hierarchy_table_;
  std::optional<embed::EmbeddingTable> text_table_;

  // per-drug sparse vectors, built on first use per category
  std::array<std::optional<std::vector<sparse::SparseWeightedVector>>, 4> sparse_;

  std::optional<double> compute_feature(const std::string& name,
                                        const kg::DrugRecord& a,
                                        const kg::DrugRecord& b);
};

struct SubstitutionCandidate {
  std::string id;
  double score = 0.0;
  bool suggested = false;  // score strictly above the threshold
};

struct SubstitutionResult {
  std::string query_id;
  double threshold = 0.85;
  std::vector<SubstitutionCandidate> ranked;  // descending score, ties by id
};

/// Scores the query against every other drug. Never includes the query;
/// candidates scoring above the threshold are flagged as substitutes.
SubstitutionResult rank_substitutes(Engine& engine, const regress::Model& model,
                                    const std::string& query, double threshold = 0.85);

struct AblationEntry {
  std::vector<std::string> selection;
  metrics::MetricReport report;  // pooled cross-validation metrics
};

/// Cross-validates one model per feature subset with a shared fold split.
std::vector<AblationEntry> run_ablation(Engine& engine,
                                        const std::vector<std::vector<std::string>>& grid);

// features.tsv: '#' header comments carry the layout; NA encodes MISSING.
void write_features_tsv(const regress::PairFeatureTable& table, const std::string& path);
regress::PairFeatureTable read_features_tsv(const std::string& path);

void write_vectors_tsv(Engine& engine, const std::string& path);
void write_bm25_cache(Engine& engine, const std::string& path);
void write_embeddings_tsv(Engine& engine, embed::Mode mode, const std::string& path);

struct TrainOptions {
  regress::ModelKind kind = regress::ModelKind::forest;
  std::optional<std::string> holdout_drug;
  std::optional<std::string> cv_report_path;  // pooled CV metrics on training rows
};

/// Filters holdout rows, trains, records the holdout and training pairs in
/// the model, optionally writes a cross-validation report.
regress::Model train_from_features(const regress::PairFeatureTable& features,
                                   const Config& cfg, const TrainOptions& options,
                                   const DiagnosticSink& sink = {});

struct EvalOutput {
  metrics::MetricReport report;
  std::optional<metrics::ZComparison> z_vs_reference;
};

EvalOutput evaluate_model(const regress::Model& model,
                          const regress::PairFeatureTable& features,
                          std::optional<double> compare_r);

void write_report_json(const EvalOutput& output, const std::string& method,
                       const std::string& path);
void write_ablation_tsv(const std::vector<AblationEntry>& entries, const std::string& path);
std::vector<std::vector<std::string>> read_grid_json(const std::string& path);

}  // namespace medsim::pipeline
