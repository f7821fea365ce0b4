#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "medsim/error.hpp"
#include "medsim/regression.hpp"

using namespace medsim;
using regress::Hyperparams;
using regress::Model;
using regress::ModelKind;
using regress::PairFeatureRow;
using regress::PairFeatureTable;

namespace {

PairFeatureRow row(std::string a, std::string b,
                   std::vector<std::optional<double>> values,
                   std::optional<double> gold) {
  return {std::move(a), std::move(b), std::move(values), gold};
}

/// columns: gold = f(values[0]) step function, up to `k` features of noise.
PairFeatureTable step_table(size_t n, size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PairFeatureTable t;
  for (size_t f = 0; f < k; ++f)
    t.feature_names.push_back(regress::canonical_feature_names()[f]);
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::optional<double>> values;
    const double x0 = static_cast<double>(rng() % 1000) / 1000.0;
    values.emplace_back(x0);
    for (size_t f = 1; f < k; ++f)
      values.emplace_back(static_cast<double>(rng() % 1000) / 1000.0);
    const double gold = x0 < 0.5 ? 0.2 : 0.8;
    t.rows.push_back(row("a" + std::to_string(i), "b" + std::to_string(i),
                         std::move(values), gold));
  }
  return t;
}

Model leaf_only_model(const std::vector<double>& leaf_values) {
  Model m;
  m.kind = leaf_values.size() == 1 ? ModelKind::tree : ModelKind::forest;
  m.feature_names = {"MF_sider"};
  m.medians = {0.5};
  for (double v : leaf_values) {
    regress::Tree tree;
    regress::TreeNode node;
    node.value = v;
    tree.nodes.push_back(node);
    m.trees.push_back(tree);
  }
  return m;
}

}  // namespace

TEST_CASE("impute leaves complete rows alone and zeroes the mask") {
  PairFeatureTable t;
  t.feature_names = {"MF_sider", "HF"};
  t.rows = {row("a", "b", {0.25, 0.75}, 0.5), row("c", "d", {0.5, 1.0}, 0.9)};
  auto result = regress::impute(t);
  REQUIRE(result.matrix.size() == 2);
  CHECK(result.matrix[0] == std::vector<double>{0.25, 0.75, 0.0, 0.0});
  CHECK(result.medians == std::vector<double>{0.375, 0.875});
}

TEST_CASE("impute fills missing cells with the training median and sets the mask") {
  PairFeatureTable t;
  t.feature_names = {"MF_sider", "HF"};
  t.rows = {row("a", "b", {0.1, std::nullopt}, 0.5),
            row("c", "d", {0.3, 0.3}, 0.6),
            row("e", "f", {0.5, 0.9}, 0.7)};
  auto result = regress::impute(t);
  CHECK(result.medians[1] == doctest::Approx(0.6));  // median of {0.3, 0.9}
  CHECK(result.matrix[0][1] == doctest::Approx(0.6));
  CHECK(result.matrix[0][3] == 1.0);
  CHECK(result.matrix[1][3] == 0.0);
}

TEST_CASE("a feature missing everywhere imputes 0.5 and warns") {
  PairFeatureTable t;
  t.feature_names = {"MF_sider", "HF"};
  t.rows = {row("a", "b", {0.1, std::nullopt}, 0.5),
            row("c", "d", {0.2, std::nullopt}, 0.6)};
  std::vector<std::string> diagnostics;
  auto result = regress::impute(t, nullptr,
                                [&](const std::string& m) { diagnostics.push_back(m); });
  CHECK(result.medians[1] == 0.5);
  REQUIRE(diagnostics.size() == 1);
  CHECK(diagnostics[0].find("HF") != std::string::npos);
}

TEST_CASE("constant targets predict that constant exactly") {
  PairFeatureTable t = step_table(40, 3, 101);
  for (auto& r : t.rows) r.gold = 0.7;
  Hyperparams hp;
  hp.n_trees = 15;
  auto model = regress::train_forest(t, hp, 7);
  for (const auto& r : t.rows) CHECK(model.predict_row(r) == 0.7);
}

TEST_CASE("a single deep unbagged tree reproduces a noise-free step function") {
  PairFeatureTable t = step_table(60, 2, 103);
  Hyperparams hp;
  hp.n_trees = 1;
  hp.bootstrap = false;
  hp.min_samples_leaf = 1;
  hp.features_per_split = 2;  // all columns stay candidates
  auto model = regress::train_forest(t, hp, 5);
  double sse = 0.0;
  for (const auto& r : t.rows) {
    const double p = model.predict_row(r);
    sse += (p - *r.gold) * (p - *r.gold);
  }
  CHECK(std::sqrt(sse / static_cast<double>(t.rows.size())) <= 1e-12);
}

TEST_CASE("training is deterministic for a fixed seed") {
  PairFeatureTable t = step_table(50, 3, 107);
  Hyperparams hp;
  hp.n_trees = 12;
  auto m1 = regress::train_forest(t, hp, 99);
  auto m2 = regress::train_forest(t, hp, 99);
  CHECK(regress::model_to_json(m1).dump() == regress::model_to_json(m2).dump());
  auto m3 = regress::train_forest(t, hp, 100);
  CHECK(regress::model_to_json(m1).dump() != regress::model_to_json(m3).dump());
}

TEST_CASE("forest training is independent of the worker count") {
  PairFeatureTable t = step_table(50, 3, 313);
  Hyperparams hp;
  hp.n_trees = 9;
  hp.workers = 1;
  auto m1 = regress::train_forest(t, hp, 21);
  hp.workers = 4;
  auto m2 = regress::train_forest(t, hp, 21);
  CHECK(regress::model_to_json(m1).dump() == regress::model_to_json(m2).dump());
}

TEST_CASE("prediction averages the trees and clamps") {
  auto m = leaf_only_model({0.2, 0.4, 0.6});
  PairFeatureRow r = row("x", "y", {0.5}, std::nullopt);
  CHECK(m.predict_row(r) == doctest::Approx(0.4));

  auto single = leaf_only_model({0.9});
  CHECK(single.predict_row(r) == 0.9);

  auto overflow = leaf_only_model({1.03, 1.03});
  CHECK(overflow.predict_row(r) == 1.0);
}

TEST_CASE("predict rejects rows of the wrong width") {
  auto m = leaf_only_model({0.5});
  try {
    m.predict(std::vector<double>{0.1, 0.2, 0.3});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == errc::dimension_mismatch);
  }
}

TEST_CASE("forest predictions stay within the training target range") {
  std::mt19937_64 rng(109);
  PairFeatureTable t = step_table(80, 3, 111);
  double lo = 1e300, hi = -1e300;
  for (auto& r : t.rows) {
    const double gold = 0.3 + static_cast<double>(rng() % 300) / 1000.0;
    r.gold = gold;
    lo = std::min(lo, gold);
    hi = std::max(hi, gold);
  }
  Hyperparams hp;
  hp.n_trees = 25;
  auto model = regress::train_forest(t, hp, 13);
  for (const auto& r : t.rows) {
    const double p = model.predict_row(r);
    CHECK(p >= lo - 1e-12);
    CHECK(p <= hi + 1e-12);
  }
}

TEST_CASE("duplicating rows leaves a fully grown tree's training predictions unchanged") {
  PairFeatureTable t = step_table(30, 2, 113);
  Hyperparams hp;
  hp.n_trees = 1;
  hp.bootstrap = false;
  hp.min_samples_leaf = 1;
  hp.features_per_split = 2;
  auto m1 = regress::train_forest(t, hp, 3);

  PairFeatureTable doubled = t;
  for (const auto& r : t.rows) doubled.rows.push_back(r);
  auto m2 = regress::train_forest(doubled, hp, 3);
  for (const auto& r : t.rows)
    CHECK(m1.predict_row(r) == doctest::Approx(m2.predict_row(r)).epsilon(1e-12));
}

TEST_CASE("cross_validate reports per-fold and pooled metrics deterministically") {
  PairFeatureTable t = step_table(60, 3, 127);
  Hyperparams hp;
  hp.n_trees = 10;
  auto cv1 = regress::cross_validate(t, ModelKind::forest, hp, 10, 17);
  auto cv2 = regress::cross_validate(t, ModelKind::forest, hp, 10, 17);
  REQUIRE(cv1.folds.size() == 10);
  CHECK(cv1.pooled.n == 60);
  CHECK(cv1.oof_predictions == cv2.oof_predictions);
  REQUIRE(cv1.pooled.pearson.has_value());
  CHECK(*cv1.pooled.pearson > 0.8);  // step signal is easy
}

TEST_CASE("a perfect-information single tree drives pooled CV rmse to ~0") {
  // gold duplicated as feature 0
  std::mt19937_64 rng(131);
  PairFeatureTable t;
  t.feature_names = {"MF_sider"};
  for (int i = 0; i < 50; ++i) {
    const double g = static_cast<double>(rng() % 900) / 1000.0 + 0.05;
    t.rows.push_back(row("a" + std::to_string(i), "b" + std::to_string(i), {g}, g));
  }
  Hyperparams hp;
  hp.n_trees = 1;
  hp.bootstrap = false;
  hp.min_samples_leaf = 1;
  hp.features_per_split = 2;
  auto cv = regress::cross_validate(t, ModelKind::tree, hp, 10, 19);
  CHECK(cv.pooled.rmse <= 0.01);
}

TEST_CASE("cross_validate rejects more folds than rows") {
  PairFeatureTable t = step_table(5, 2, 137);
  Hyperparams hp;
  try {
    regress::cross_validate(t, ModelKind::forest, hp, 10, 1);
    FAIL("expected TooFewRows");
  } catch (const Error& e) {
    CHECK(e.code() == errc::too_few_rows);
  }
}

TEST_CASE("linear baseline recovers clean coefficients within 1e-6") {
  std::mt19937_64 rng(139);
  PairFeatureTable t;
  t.feature_names = {"MF_sider", "HF"};
  for (int i = 0; i < 200; ++i) {
    const double x0 = static_cast<double>(rng() % 1000) / 1000.0;
    const double x1 = static_cast<double>(rng() % 1000) / 1000.0;
    t.rows.push_back(row("a" + std::to_string(i), "b" + std::to_string(i), {x0, x1},
                         0.5 * x0 + 0.1));
  }
  std::vector<std::string> diagnostics;
  auto model = regress::train_baseline(t, ModelKind::linear, {}, 1,
                                       [&](const std::string& m) { diagnostics.push_back(m); });
  // constant mask columns force the ridge fallback
  REQUIRE(diagnostics.size() == 1);
  CHECK(model.coefficients[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(model.coefficients[1]) < 1e-6);
  CHECK(model.intercept == doctest::Approx(0.1).epsilon(1e-5));
  for (const auto& r : t.rows)
    CHECK(model.predict_row(r) == doctest::Approx(0.5 * *r.values[0] + 0.1).epsilon(1e-5));
}

TEST_CASE("duplicate feature columns take the ridge path") {
  std::mt19937_64 rng(149);
  PairFeatureTable t;
  t.feature_names = {"MF_sider", "MF_target"};
  for (int i = 0; i < 50; ++i) {
    const double x = static_cast<double>(rng() % 1000) / 1000.0;
    t.rows.push_back(row("a" + std::to_string(i), "b" + std::to_string(i), {x, x},
                         0.8 * x));
  }
  std::vector<std::string> diagnostics;
  auto model = regress::train_baseline(t, ModelKind::linear, {}, 1,
                                       [&](const std::string& m) { diagnostics.push_back(m); });
  REQUIRE(!diagnostics.empty());
  CHECK(diagnostics[0].find("ridge") != std::string::npos);
  for (const auto& r : t.rows)
    CHECK(model.predict_row(r) == doctest::Approx(0.8 * *r.values[0]).epsilon(1e-3));
}

TEST_CASE("tree baseline equals a one-tree unbagged forest") {
  PairFeatureTable t = step_table(50, 3, 151);
  Hyperparams hp;
  hp.min_samples_leaf = 2;
  auto tree_model = regress::train_baseline(t, ModelKind::tree, hp, 23);
  Hyperparams forest_hp = hp;
  forest_hp.n_trees = 1;
  forest_hp.bootstrap = false;
  auto forest_model = regress::train_forest(t, forest_hp, 23);
  for (const auto& r : t.rows)
    CHECK(tree_model.predict_row(r) == forest_model.predict_row(r));
}

TEST_CASE("model serialization round-trips bit-identical predictions") {
  PairFeatureTable t = step_table(60, 4, 157);
  Hyperparams hp;
  hp.n_trees = 20;
  auto model = regress::train_forest(t, hp, 29);
  auto restored = regress::model_from_json(regress::model_to_json(model));

  std::mt19937_64 rng(163);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::optional<double>> values;
    for (int f = 0; f < 4; ++f) {
      if (rng() % 5 == 0)
        values.emplace_back(std::nullopt);
      else
        values.emplace_back(static_cast<double>(rng() % 1000) / 1000.0);
    }
    PairFeatureRow probe = row("p", "q", values, std::nullopt);
    CHECK(model.predict_row(probe) == restored.predict_row(probe));
  }
  CHECK(restored.training_pairs == model.training_pairs);
}

TEST_CASE("model files with foreign layouts are rejected") {
  auto j = regress::model_to_json(leaf_only_model({0.5}));
  j["feature_names"] = {"bogus"};
  try {
    regress::model_from_json(j);
    FAIL("expected LayoutMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == errc::layout_mismatch);
  }

  auto j2 = regress::model_to_json(leaf_only_model({0.5}));
  j2["trees"] = nlohmann::json::array({nlohmann::json::array({7, 0.5,
      nlohmann::json::array({0.1}), nlohmann::json::array({0.2})})});
  try {
    regress::model_from_json(j2);
    FAIL("expected LayoutMismatch for out-of-range split");
  } catch (const Error& e) {
    CHECK(e.code() == errc::layout_mismatch);
  }
}

TEST_CASE("train_forest needs at least two labeled rows") {
  PairFeatureTable t;
  t.feature_names = {"MF_sider"};
  t.rows = {row("a", "b", {0.5}, 0.5)};
  try {
    regress::train_forest(t, {}, 1);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == errc::insufficient_data);
  }
}
