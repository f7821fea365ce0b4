#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "medsim.h"
#include "temp_dir.hpp"

using testutil::TempDir;

namespace {

const std::string kConfig = std::string(MEDSIM_FIXTURE_DIR) + "/synthetic30/config.toml";

struct Engine {
  medsim_engine* ptr = nullptr;
  ~Engine() { medsim_engine_free(ptr); }
};

struct Model {
  medsim_model* ptr = nullptr;
  ~Model() { medsim_model_free(ptr); }
};

}  // namespace

TEST_CASE("version and null-argument handling") {
  CHECK(medsim_version() != nullptr);
  CHECK(medsim_engine_open(nullptr, nullptr) == MEDSIM_ERR_INVALID);
  CHECK(medsim_train(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr) ==
        MEDSIM_ERR_INVALID);
  CHECK(std::strlen(medsim_last_error()) > 0);
}

TEST_CASE("opening a missing config reports MEDSIM_ERR_CONFIG") {
  medsim_engine* engine = nullptr;
  CHECK(medsim_engine_open("/does/not/exist.toml", &engine) == MEDSIM_ERR_CONFIG);
  CHECK(engine == nullptr);
}

TEST_CASE("full engine lifecycle over the bundled fixture") {
  Engine engine;
  REQUIRE(medsim_engine_open(kConfig.c_str(), &engine.ptr) == MEDSIM_OK);

  char* summary = nullptr;
  REQUIRE(medsim_engine_validate(engine.ptr, &summary) == MEDSIM_OK);
  CHECK(std::string(summary).find("drugs: 30") != std::string::npos);
  medsim_string_free(summary);

  TempDir dir;
  const std::string features = dir.join("features.tsv");
  const std::string model_path = dir.join("model.json");
  const std::string report = dir.join("report.json");

  REQUIRE(medsim_engine_featurize(engine.ptr, nullptr, 0, features.c_str()) == MEDSIM_OK);
  REQUIRE(medsim_train(kConfig.c_str(), features.c_str(), "forest", nullptr, nullptr,
                       model_path.c_str()) == MEDSIM_OK);

  Model model;
  REQUIRE(medsim_model_open(model_path.c_str(), &model.ptr) == MEDSIM_OK);

  const double reference = 0.25;
  REQUIRE(medsim_evaluate(model.ptr, features.c_str(), &reference, report.c_str()) ==
          MEDSIM_OK);
  CHECK(testutil::slurp(report).find("pearson") != std::string::npos);

  double score = 0.0;
  REQUIRE(medsim_score(engine.ptr, model.ptr, "AB01", "AB02", &score) == MEDSIM_OK);
  CHECK(score >= 0.0);
  CHECK(score <= 1.0);

  // names resolve too, and the pair order cannot matter
  double score_by_name = 0.0;
  REQUIRE(medsim_score(engine.ptr, model.ptr, "Amicillin", "Amimicin",
                       &score_by_name) == MEDSIM_OK);
  CHECK(score_by_name == score);

  CHECK(medsim_score(engine.ptr, model.ptr, "AB01", "nonexistent", &score) ==
        MEDSIM_ERR_NOT_FOUND);

  medsim_ranking* ranking = nullptr;
  REQUIRE(medsim_rank(engine.ptr, model.ptr, "AB01", 0.5, &ranking) == MEDSIM_OK);
  REQUIRE(medsim_ranking_size(ranking) == 29);
  double prev = 2.0;
  for (size_t i = 0; i < medsim_ranking_size(ranking); ++i) {
    CHECK(std::string(medsim_ranking_id(ranking, i)) != "AB01");
    const double s = medsim_ranking_score(ranking, i);
    CHECK(s <= prev);
    CHECK(medsim_ranking_suggested(ranking, i) == (s > 0.5 ? 1 : 0));
    prev = s;
  }
  medsim_ranking_free(ranking);
}

TEST_CASE("embeddings and debug dumps are written") {
  Engine engine;
  REQUIRE(medsim_engine_open(kConfig.c_str(), &engine.ptr) == MEDSIM_OK);
  TempDir dir;
  const std::string emb = dir.join("embeddings.tsv");
  REQUIRE(medsim_engine_write_embeddings(engine.ptr, "hierarchy", emb.c_str()) ==
          MEDSIM_OK);
  CHECK(testutil::slurp(emb).rfind("dim=32 mode=hierarchy config=", 0) == 0);

  CHECK(medsim_engine_write_embeddings(engine.ptr, "bogus", emb.c_str()) ==
        MEDSIM_ERR_CONFIG);

  const std::string vectors = dir.join("vectors.tsv");
  const std::string bm25 = dir.join("bm25_index.json");
  REQUIRE(medsim_engine_dump_vectors(engine.ptr, vectors.c_str()) == MEDSIM_OK);
  REQUIRE(medsim_engine_dump_bm25(engine.ptr, bm25.c_str()) == MEDSIM_OK);
  CHECK(testutil::slurp(vectors).find("side_effect") != std::string::npos);
  CHECK(testutil::slurp(bm25).find("avgdl") != std::string::npos);
}

TEST_CASE("holdout training audits cleanly through the model file") {
  Engine engine;
  REQUIRE(medsim_engine_open(kConfig.c_str(), &engine.ptr) == MEDSIM_OK);
  TempDir dir;
  const std::string features = dir.join("features.tsv");
  const std::string model_path = dir.join("model.json");
  REQUIRE(medsim_engine_featurize(engine.ptr, nullptr, 0, features.c_str()) == MEDSIM_OK);
  REQUIRE(medsim_train(kConfig.c_str(), features.c_str(), "forest", "AB07", nullptr,
                       model_path.c_str()) == MEDSIM_OK);
  const std::string contents = testutil::slurp(model_path);
  CHECK(contents.find("\"holdout_drug\":\"AB07\"") != std::string::npos);
  CHECK(contents.find("[\"AB07\",") == std::string::npos);
  CHECK(contents.find(",\"AB07\"]") == std::string::npos);
}

TEST_CASE("ablation writes one row per grid subset") {
  Engine engine;
  REQUIRE(medsim_engine_open(kConfig.c_str(), &engine.ptr) == MEDSIM_OK);
  TempDir dir;
  const std::string grid = dir.file("grid.json", R"([["MF_sider"],["MF_sider","HF"]])");
  const std::string out = dir.join("ablation.tsv");
  REQUIRE(medsim_engine_ablate(engine.ptr, grid.c_str(), out.c_str()) == MEDSIM_OK);
  const std::string contents = testutil::slurp(out);
  CHECK(contents.find("MF_sider\t") != std::string::npos);
  CHECK(contents.find("MF_sider+HF\t") != std::string::npos);
}
