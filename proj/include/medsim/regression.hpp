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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "medsim/error.hpp"
#include "medsim/evaluation.hpp"

namespace medsim::regress {

/// Canonical feature order; subsets keep this order.
const std::vector<std::string>& canonical_feature_names();
bool is_feature_name(const std::string& name);

/// One drug pair with its per-feature values (nullopt = MISSING) and an
/// optional gold score.
struct PairFeatureRow {
  std::string drug_a;
  std::string drug_b;
  std::vector<std::optional<double>> values;
  std::optional<double> gold;
};

struct PairFeatureTable {
  std::vector<std::string> feature_names;
  std::vector<PairFeatureRow> rows;

  size_t feature_count() const { return feature_names.size(); }
};

/// Imputed design matrix: k medians-filled values followed by k mask
/// indicator columns per row (2k columns total).
struct ImputeResult {
  std::vector<std::vector<double>> matrix;
  std::vector<double> medians;
};

/// Fills MISSING cells with per-feature training medians and appends the
/// missingness mask as extra binary columns. When `medians` is null they
/// are computed from the given rows; a feature that is missing everywhere
/// gets median 0.5 plus a diagnostic.
ImputeResult impute(const PairFeatureTable& table,
                    const std::vector<double>* medians = nullptr,
                    const DiagnosticSink& sink = {});

struct Hyperparams {
  int n_trees = 200;
  int max_depth = 0;           // 0 = unlimited
  int min_samples_leaf = 2;
  int features_per_split = 0;  // 0 = ceil(columns / 3)
  bool bootstrap = true;
  int workers = 1;             // results independent of worker count
};

enum class ModelKind { forest, linear, tree };
const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> row) const;
};

/// A trained model: forest/tree store CART trees, linear stores OLS
/// coefficients. Imputation medians and the training pair ids travel with
/// the model so downstream scoring and audits are self-contained.
struct Model {
  int format_version = 1;
  ModelKind kind = ModelKind::forest;
  std::vector<std::string> feature_names;
  std::vector<double> medians;
  Hyperparams hp;
  std::uint64_t seed = 0;
  std::vector<Tree> trees;
  std::vector<double> coefficients;  // linear: 2k values
  double intercept = 0.0;
  std::optional<std::string> holdout_drug;
  std::vector<std::pair<std::string, std::string>> training_pairs;

  size_t column_count() const { return feature_names.size() * 2; }

  /// Mean over trees (or the linear response), clamped to [0,1].
  /// Throws DimensionMismatch when the imputed row width is wrong.
  double predict(std::span<const double> imputed_row) const;

  /// Imputes one raw row with the stored medians, then predicts.
  double predict_row(const PairFeatureRow& row) const;
};

/// Bootstrap-bagged CART regression forest with MSE splits and a random
/// feature subset per node. Deterministic for a fixed seed: per-tree seeds
/// derive from the master seed, so worker count cannot change the result.
Model train_forest(const PairFeatureTable& labeled, const Hyperparams& hp,
                   std::uint64_t seed, const DiagnosticSink& sink = {});

/// linear: ordinary least squares over the 2k imputed columns (ridge 1e-6
/// fallback on a singular design, with a warning). tree: one unbagged CART.
Model train_baseline(const PairFeatureTable& labeled, ModelKind kind,
                     const Hyperparams& hp, std::uint64_t seed,
                     const DiagnosticSink& sink = {});

struct CvResult {
  std::vector<metrics::MetricReport> folds;
  metrics::MetricReport pooled;  // over concatenated out-of-fold predictions
  std::vector<double> oof_predictions;  // in original row order
};

/// Deterministic shuffled k-fold split; imputation medians are recomputed
/// on each training remainder. Throws TooFewRows when rows < k.
CvResult cross_validate(const PairFeatureTable& labeled, ModelKind kind,
                        const Hyperparams& hp, int k, std::uint64_t seed,
                        const DiagnosticSink& sink = {});

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace medsim::regress
