#include <doctest.h>

#include <cstdlib>

#include "medsim/config.hpp"
#include "medsim/error.hpp"
#include "temp_dir.hpp"

using namespace medsim;
using testutil::TempDir;

namespace {

const char* kMinimalConfig =
    "seed = 7\n"
    "feature_selection = [\"HF\", \"MF_sider\"]\n"
    "\n"
    "[data]\n"
    "drugs = \"drugs.jsonl\"\n"
    "taxonomy = \"tax/taxonomy.tsv\"\n"
    "\n"
    "[bm25]\n"
    "k1 = 1.5\n"
    "\n"
    "[forest]\n"
    "n_trees = 33\n";

}  // namespace

TEST_CASE("load_config parses sections and resolves relative paths") {
  TempDir dir;
  const std::string path = dir.file("config.toml", kMinimalConfig);
  Config cfg = load_config(path);

  CHECK(cfg.seed == 7);
  CHECK(cfg.bm25.k1 == 1.5);
  CHECK(cfg.bm25.b == 0.75);  // default
  CHECK(cfg.forest.n_trees == 33);
  CHECK(cfg.forest.min_samples_leaf == 2);
  CHECK(cfg.max_rater_range == 0.4);
  // canonical ordering regardless of the file's order
  CHECK(cfg.feature_selection == std::vector<std::string>{"MF_sider", "HF"});
  CHECK(cfg.data.drugs == (dir.path() / "drugs.jsonl").string());
  CHECK(cfg.data.taxonomy == (dir.path() / "tax/taxonomy.tsv").string());
  CHECK(cfg.data.corpus.empty());
}

TEST_CASE("defaults follow the documented hyperparameters") {
  Config cfg = default_config();
  CHECK(cfg.walks.walks_per_node == 40);
  CHECK(cfg.walks.walk_length == 20);
  CHECK(cfg.hierarchy_sgns.dimension == 64);
  CHECK(cfg.hierarchy_sgns.window == 5);
  CHECK(cfg.hierarchy_sgns.negatives == 5);
  CHECK(cfg.hierarchy_sgns.epochs == 5);
  CHECK(cfg.text_sgns.dimension == 128);
  CHECK(cfg.text_sgns.min_count == 5);
  CHECK(cfg.forest.n_trees == 200);
  CHECK(cfg.forest.max_depth == 0);
  CHECK(cfg.cv_folds == 10);
  CHECK(cfg.feature_selection.size() == 7);
}

TEST_CASE("unknown keys are config errors") {
  TempDir dir;
  const std::string path =
      dir.file("config.toml", "typo_key = 3\n[data]\ndrugs = \"x\"\n");
  try {
    load_config(path);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::config_error);
  }
}

TEST_CASE("unknown feature names are config errors") {
  TempDir dir;
  const std::string path = dir.file(
      "config.toml", "feature_selection = [\"HF\", \"XX\"]\n[data]\ndrugs = \"x\"\n");
  try {
    load_config(path);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::config_error);
  }
}

TEST_CASE("missing drugs path is a config error") {
  TempDir dir;
  const std::string path = dir.file("config.toml", "seed = 1\n");
  try {
    load_config(path);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::config_error);
  }
}

TEST_CASE("missing config file is a config error") {
  try {
    load_config("/nonexistent/config.toml");
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::config_error);
  }
}

TEST_CASE("MEDSIM_SEED overrides the config seed") {
  TempDir dir;
  const std::string path = dir.file("config.toml", kMinimalConfig);

  ::setenv("MEDSIM_SEED", "4242", 1);
  Config cfg = load_config(path);
  ::unsetenv("MEDSIM_SEED");
  CHECK(cfg.seed == 4242);

  ::setenv("MEDSIM_SEED", "not-a-number", 1);
  bool threw = false;
  try {
    load_config(path);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.code() == errc::config_error);
  }
  ::unsetenv("MEDSIM_SEED");
  CHECK(threw);
}

TEST_CASE("worker count propagates into stage configs") {
  TempDir dir;
  const std::string path =
      dir.file("config.toml", "workers = 3\n[data]\ndrugs = \"x\"\n");
  Config cfg = load_config(path);
  CHECK(cfg.hierarchy_sgns.workers == 3);
  CHECK(cfg.text_sgns.workers == 3);
  CHECK(cfg.forest.workers == 3);
}

TEST_CASE("invalid learning-rate schedules are config errors") {
  TempDir dir;
  const std::string path = dir.file(
      "config.toml",
      "[data]\ndrugs = \"x\"\n[text_embedding]\nlr_initial = 0.001\nlr_final = 0.01\n");
  try {
    load_config(path);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::config_error);
  }
}
