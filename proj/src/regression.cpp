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

#include "medsim/regression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include <Eigen/Dense>
#include <json.hpp>

#include "medsim/rng.hpp"

namespace medsim::regress {

namespace {

constexpr std::uint64_t kForestStream = 0x666f7265ULL;  // "fore"
constexpr std::uint64_t kCvStream = 0x63766378ULL;      // "cvcx"

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> gold_column(const PairFeatureTable& table) {
  std::vector<double> y;
  y.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (!row.gold)
      fail(errc::invalid_argument,
           "row " + row.drug_a + "/" + row.drug_b + " has no gold score");
    y.push_back(*row.gold);
  }
  return y;
}

struct TreeBuilder {
  const std::vector<std::vector<double>>& matrix;
  const std::vector<double>& targets;
  const Hyperparams& hp;
  int columns;
  int features_per_split;
  rng::Generator& gen;
  Tree tree;

  int build(std::vector<size_t>& indices, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double sum = 0.0;
    for (size_t i : indices) sum += targets[i];
    const double mean = sum / static_cast<double>(indices.size());

    bool constant = true;
    for (size_t i : indices)
      if (targets[i] != targets[indices.front()]) {
        constant = false;
        break;
      }

    const bool depth_capped = hp.max_depth > 0 && depth >= hp.max_depth;
    if (constant || depth_capped ||
        indices.size() < 2 * static_cast<size_t>(hp.min_samples_leaf)) {
      tree.nodes[node_id].value = mean;
      return node_id;
    }

    // Random feature subset, iterated in ascending order so equal-gain ties
    // resolve to the lowest feature index, then the lowest threshold.
    std::vector<int> candidates(static_cast<size_t>(columns));
    std::iota(candidates.begin(), candidates.end(), 0);
    for (int i = 0; i < features_per_split; ++i) {
      const size_t j = static_cast<size_t>(i) +
                       gen.below(candidates.size() - static_cast<size_t>(i));
      std::swap(candidates[static_cast<size_t>(i)], candidates[j]);
    }
    candidates.resize(static_cast<size_t>(features_per_split));
    std::sort(candidates.begin(), candidates.end());

    const size_t n = indices.size();
    double total_sum = sum;

    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, double>> sorted(n);  // (value, target)
    for (int feature : candidates) {
      for (size_t i = 0; i < n; ++i)
        sorted[i] = {matrix[indices[i]][static_cast<size_t>(feature)], targets[indices[i]]};
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double left_sum = 0.0;
      const double parent_score = total_sum * total_sum / static_cast<double>(n);
      for (size_t i = 1; i < n; ++i) {
        left_sum += sorted[i - 1].second;
        if (sorted[i - 1].first == sorted[i].first) continue;
        if (i < static_cast<size_t>(hp.min_samples_leaf) ||
            n - i < static_cast<size_t>(hp.min_samples_leaf))
          continue;
        const double right_sum = total_sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(i) +
                            right_sum * right_sum / static_cast<double>(n - i) -
                            parent_score;
        if (gain > best_gain) {
          double lo = sorted[i - 1].first, hi = sorted[i].first;
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold < hi)) threshold = lo;  // midpoint rounded onto hi
          best_gain = gain;
          best_feature = feature;
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) {
      tree.nodes[node_id].value = mean;
      return node_id;
    }

    std::vector<size_t> left, right;
    for (size_t i : indices) {
      if (matrix[i][static_cast<size_t>(best_feature)] <= best_threshold)
        left.push_back(i);
      else
        right.push_back(i);
    }

    tree.nodes[node_id].feature = best_feature;
    tree.nodes[node_id].threshold = best_threshold;
    const int left_id = build(left, depth + 1);
    tree.nodes[node_id].left = left_id;
    const int right_id = build(right, depth + 1);
    tree.nodes[node_id].right = right_id;
    return node_id;
  }
};

Tree build_tree(const std::vector<std::vector<double>>& matrix,
                const std::vector<double>& targets, const Hyperparams& hp,
                std::uint64_t seed) {
  rng::Generator gen(seed);
  const int columns = static_cast<int>(matrix.front().size());
  int per_split = hp.features_per_split > 0
                      ? std::min(hp.features_per_split, columns)
                      : (columns + 2) / 3;

  std::vector<size_t> indices;
  if (hp.bootstrap) {
    indices.resize(matrix.size());
    for (auto& i : indices) i = gen.below(matrix.size());
  } else {
    indices.resize(matrix.size());
    std::iota(indices.begin(), indices.end(), size_t{0});
  }

  TreeBuilder builder{matrix, targets, hp, columns, per_split, gen, {}};
  builder.build(indices, 0);
  return std::move(builder.tree);
}

nlohmann::json tree_node_to_json(const Tree& tree, int node_id) {
  const TreeNode& node = tree.nodes[static_cast<size_t>(node_id)];
  if (node.is_leaf()) return nlohmann::json::array({node.value});
  return nlohmann::json::array({node.feature, node.threshold,
                                tree_node_to_json(tree, node.left),
                                tree_node_to_json(tree, node.right)});
}

int tree_node_from_json(const nlohmann::json& j, Tree& tree, size_t max_columns) {
  if (!j.is_array() || (j.size() != 1 && j.size() != 4))
    fail(errc::layout_mismatch, "malformed tree node in model file");
  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.size() == 1) {
    tree.nodes[static_cast<size_t>(node_id)].value = j[0].get<double>();
    return node_id;
  }
  const int feature = j[0].get<int>();
  if (feature < 0 || static_cast<size_t>(feature) >= max_columns)
    fail(errc::layout_mismatch,
         "tree split references feature column " + std::to_string(feature) +
             " outside the model layout");
  tree.nodes[static_cast<size_t>(node_id)].feature = feature;
  tree.nodes[static_cast<size_t>(node_id)].threshold = j[1].get<double>();
  const int left = tree_node_from_json(j[2], tree, max_columns);
  tree.nodes[static_cast<size_t>(node_id)].left = left;
  const int right = tree_node_from_json(j[3], tree, max_columns);
  tree.nodes[static_cast<size_t>(node_id)].right = right;
  return node_id;
}

}  // namespace

const std::vector<std::string>& canonical_feature_names() {
  static const std::vector<std::string> names = {
      "MF_sider", "MF_target", "MF_mechanism", "MF_pe",
      "HF",       "SF_ksts",   "SF_textemb"};
  return names;
}

bool is_feature_name(const std::string& name) {
  const auto& names = canonical_feature_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::forest: return "forest";
    case ModelKind::linear: return "linear";
    case ModelKind::tree: return "tree";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "forest") return ModelKind::forest;
  if (name == "linear") return ModelKind::linear;
  if (name == "tree") return ModelKind::tree;
  fail(errc::config_error, "model kind must be forest, linear or tree, got '" + name + "'");
}

ImputeResult impute(const PairFeatureTable& table, const std::vector<double>* medians,
                    const DiagnosticSink& sink) {
  const size_t k = table.feature_count();
  if (table.rows.empty()) fail(errc::insufficient_data, "no rows to impute");

  ImputeResult result;
  if (medians) {
    if (medians->size() != k)
      fail(errc::dimension_mismatch,
           "median vector has " + std::to_string(medians->size()) +
               " entries for " + std::to_string(k) + " features");
    result.medians = *medians;
  } else {
    result.medians.resize(k);
    for (size_t f = 0; f < k; ++f) {
      std::vector<double> present;
      for (const auto& row : table.rows)
        if (row.values[f]) present.push_back(*row.values[f]);
      if (present.empty()) {
        result.medians[f] = 0.5;
        emit_diagnostic(sink, "feature " + table.feature_names[f] +
                                  " is missing in every training row; imputing 0.5");
      } else {
        result.medians[f] = median_of(std::move(present));
      }
    }
  }

  result.matrix.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.values.size() != k)
      fail(errc::dimension_mismatch, "row width does not match feature names");
    std::vector<double> cols(2 * k);
    for (size_t f = 0; f < k; ++f) {
      cols[f] = row.values[f] ? *row.values[f] : result.medians[f];
      cols[k + f] = row.values[f] ? 0.0 : 1.0;
    }
    result.matrix.push_back(std::move(cols));
  }
  return result;
}

double Tree::predict(std::span<const double> row) const {
  size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& n = nodes[node];
    node = static_cast<size_t>(row[static_cast<size_t>(n.feature)] <= n.threshold
                                   ? n.left
                                   : n.right);
  }
  return nodes[node].value;
}

double Model::predict(std::span<const double> imputed_row) const {
  if (imputed_row.size() != column_count())
    fail(errc::dimension_mismatch,
         "row has " + std::to_string(imputed_row.size()) + " columns, model expects " +
             std::to_string(column_count()));

  double value = 0.0;
  if (kind == ModelKind::linear) {
    value = intercept;
    for (size_t i = 0; i < coefficients.size(); ++i)
      value += coefficients[i] * imputed_row[i];
  } else {
    for (const auto& tree : trees) value += tree.predict(imputed_row);
    value /= static_cast<double>(trees.size());
  }
  return std::clamp(value, 0.0, 1.0);
}

double Model::predict_row(const PairFeatureRow& row) const {
  const size_t k = feature_names.size();
  if (row.values.size() != k)
    fail(errc::dimension_mismatch,
         "row has " + std::to_string(row.values.size()) + " features, model expects " +
             std::to_string(k));
  std::vector<double> cols(2 * k);
  for (size_t f = 0; f < k; ++f) {
    cols[f] = row.values[f] ? *row.values[f] : medians[f];
    cols[k + f] = row.values[f] ? 0.0 : 1.0;
  }
  return predict(cols);
}

Model train_forest(const PairFeatureTable& labeled, const Hyperparams& hp,
                   std::uint64_t seed, const DiagnosticSink& sink) {
  if (labeled.rows.size() < 2)
    fail(errc::insufficient_data,
         "need at least 2 labeled rows, got " + std::to_string(labeled.rows.size()));
  if (hp.n_trees < 1) fail(errc::config_error, "n_trees must be >= 1");
  if (hp.min_samples_leaf < 1) fail(errc::config_error, "min_samples_leaf must be >= 1");

  ImputeResult imputed = impute(labeled, nullptr, sink);
  const std::vector<double> y = gold_column(labeled);

  Model model;
  model.kind = ModelKind::forest;
  model.feature_names = labeled.feature_names;
  model.medians = imputed.medians;
  model.hp = hp;
  model.seed = seed;
  for (const auto& row : labeled.rows)
    model.training_pairs.emplace_back(row.drug_a, row.drug_b);

  model.trees.resize(static_cast<size_t>(hp.n_trees));
  const int workers = std::max(1, hp.workers);
  auto train_range = [&](size_t begin, size_t end) {
    for (size_t t = begin; t < end; ++t)
      model.trees[t] = build_tree(imputed.matrix, y, hp,
                                  rng::derive_seed(seed ^ kForestStream, t));
  };
  if (workers == 1 || hp.n_trees == 1) {
    train_range(0, model.trees.size());
  } else {
    std::vector<std::thread> threads;
    const size_t chunk = (model.trees.size() + static_cast<size_t>(workers) - 1) /
                         static_cast<size_t>(workers);
    for (int w = 0; w < workers; ++w) {
      const size_t begin = static_cast<size_t>(w) * chunk;
      const size_t end = std::min(model.trees.size(), begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(train_range, begin, end);
    }
    for (auto& t : threads) t.join();
  }
  return model;
}

Model train_baseline(const PairFeatureTable& labeled, ModelKind kind,
                     const Hyperparams& hp, std::uint64_t seed,
                     const DiagnosticSink& sink) {
  if (kind == ModelKind::tree) {
    Hyperparams single = hp;
    single.n_trees = 1;
    single.bootstrap = false;
    Model model = train_forest(labeled, single, seed, sink);
    model.kind = ModelKind::tree;
    return model;
  }
  if (kind != ModelKind::linear)
    fail(errc::config_error, "train_baseline supports linear or tree");

  if (labeled.rows.size() < 2)
    fail(errc::insufficient_data,
         "need at least 2 labeled rows, got " + std::to_string(labeled.rows.size()));

  ImputeResult imputed = impute(labeled, nullptr, sink);
  const std::vector<double> y = gold_column(labeled);

  const size_t n = imputed.matrix.size();
  const size_t cols = imputed.matrix.front().size() + 1;  // + intercept
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  Eigen::VectorXd Y(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j + 1 < cols; ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = imputed.matrix[i][j];
    X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols - 1)) = 1.0;
    Y(static_cast<Eigen::Index>(i)) = y[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  Eigen::VectorXd beta;
  if (qr.rank() < static_cast<Eigen::Index>(cols)) {
    emit_diagnostic(sink, "singular design matrix; refitting with ridge penalty 1e-6");
    Eigen::MatrixXd gram = X.transpose() * X;
    gram.diagonal().array() += 1e-6;
    beta = gram.ldlt().solve(X.transpose() * Y);
  } else {
    beta = qr.solve(Y);
  }

  Model model;
  model.kind = ModelKind::linear;
  model.feature_names = labeled.feature_names;
  model.medians = imputed.medians;
  model.hp = hp;
  model.seed = seed;
  model.coefficients.assign(beta.data(), beta.data() + cols - 1);
  model.intercept = beta(static_cast<Eigen::Index>(cols - 1));
  for (const auto& row : labeled.rows)
    model.training_pairs.emplace_back(row.drug_a, row.drug_b);
  return model;
}

CvResult cross_validate(const PairFeatureTable& labeled, ModelKind kind,
                        const Hyperparams& hp, int k, std::uint64_t seed,
                        const DiagnosticSink& sink) {
  const size_t n = labeled.rows.size();
  if (k < 2) fail(errc::config_error, "cross-validation needs k >= 2");
  if (n < static_cast<size_t>(k))
    fail(errc::too_few_rows,
         std::to_string(n) + " rows cannot be split into " + std::to_string(k) + " folds");
  (void)gold_column(labeled);  // reject unlabeled rows up front

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  rng::Generator gen(rng::derive_seed(seed ^ kCvStream, 0));
  for (size_t i = n - 1; i > 0; --i) {
    const size_t j = gen.below(i + 1);
    std::swap(order[i], order[j]);
  }
  std::vector<int> fold_of(n);
  for (size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = static_cast<int>(pos % static_cast<size_t>(k));

  CvResult result;
  result.oof_predictions.assign(n, 0.0);
  std::vector<double> pooled_gold(n, 0.0);

  for (int f = 0; f < k; ++f) {
    PairFeatureTable train_table{labeled.feature_names, {}};
    std::vector<size_t> test_indices;
    for (size_t i = 0; i < n; ++i) {
      if (fold_of[i] == f)
        test_indices.push_back(i);
      else
        train_table.rows.push_back(labeled.rows[i]);
    }

    Model model;
    const std::uint64_t fold_seed = rng::derive_seed(seed, static_cast<std::uint64_t>(f) + 1);
    if (kind == ModelKind::forest)
      model = train_forest(train_table, hp, fold_seed, sink);
    else
      model = train_baseline(train_table, kind, hp, fold_seed, sink);

    std::vector<double> pred, gold;
    for (size_t i : test_indices) {
      const double p = model.predict_row(labeled.rows[i]);
      pred.push_back(p);
      gold.push_back(*labeled.rows[i].gold);
      result.oof_predictions[i] = p;
      pooled_gold[i] = *labeled.rows[i].gold;
    }
    result.folds.push_back(metrics::compute_report(pred, gold));
  }

  result.pooled = metrics::compute_report(result.oof_predictions, pooled_gold);
  return result;
}

nlohmann::json model_to_json(const Model& model) {
  nlohmann::json j;
  j["format"] = "medsim-model";
  j["format_version"] = model.format_version;
  j["kind"] = to_string(model.kind);
  j["feature_names"] = model.feature_names;
  j["medians"] = model.medians;
  j["hyperparams"] = {{"n_trees", model.hp.n_trees},
                      {"max_depth", model.hp.max_depth},
                      {"min_samples_leaf", model.hp.min_samples_leaf},
                      {"features_per_split", model.hp.features_per_split},
                      {"bootstrap", model.hp.bootstrap}};
  j["seed"] = model.seed;
  if (model.holdout_drug)
    j["holdout_drug"] = *model.holdout_drug;
  else
    j["holdout_drug"] = nullptr;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : model.training_pairs)
    pairs.push_back(nlohmann::json::array({a, b}));
  j["training_pairs"] = std::move(pairs);

  if (model.kind == ModelKind::linear) {
    j["coefficients"] = model.coefficients;
    j["intercept"] = model.intercept;
  } else {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : model.trees) trees.push_back(tree_node_to_json(tree, 0));
    j["trees"] = std::move(trees);
  }
  return j;
}

Model model_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "medsim-model")
      fail(errc::layout_mismatch, "not a medsim model file");
    Model model;
    model.format_version = j.at("format_version").get<int>();
    if (model.format_version != 1)
      fail(errc::layout_mismatch,
           "unsupported model format_version " + std::to_string(model.format_version));
    model.kind = model_kind_from_string(j.at("kind").get<std::string>());
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& name : model.feature_names)
      if (!is_feature_name(name))
        fail(errc::layout_mismatch, "unknown feature name '" + name + "' in model");
    model.medians = j.at("medians").get<std::vector<double>>();
    if (model.medians.size() != model.feature_names.size())
      fail(errc::layout_mismatch, "median count does not match feature names");

    const auto& hp = j.at("hyperparams");
    model.hp.n_trees = hp.at("n_trees").get<int>();
    model.hp.max_depth = hp.at("max_depth").get<int>();
    model.hp.min_samples_leaf = hp.at("min_samples_leaf").get<int>();
    model.hp.features_per_split = hp.at("features_per_split").get<int>();
    model.hp.bootstrap = hp.at("bootstrap").get<bool>();
    model.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("holdout_drug") && !j.at("holdout_drug").is_null())
      model.holdout_drug = j.at("holdout_drug").get<std::string>();
    for (const auto& pair : j.at("training_pairs"))
      model.training_pairs.emplace_back(pair.at(0).get<std::string>(),
                                        pair.at(1).get<std::string>());

    if (model.kind == ModelKind::linear) {
      model.coefficients = j.at("coefficients").get<std::vector<double>>();
      model.intercept = j.at("intercept").get<double>();
      if (model.coefficients.size() != model.column_count())
        fail(errc::layout_mismatch, "coefficient count does not match feature layout");
    } else {
      for (const auto& tj : j.at("trees")) {
        Tree tree;
        tree_node_from_json(tj, tree, model.column_count());
        model.trees.push_back(std::move(tree));
      }
      if (model.trees.empty())
        fail(errc::layout_mismatch, "model has no trees");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::layout_mismatch, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write '" + path + "'");
  out << model_to_json(model).dump() << '\n';
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::layout_mismatch, path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace medsim::regress
