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

// Batch CLI over the medsim C API. Exit codes: 0 ok, 1 data error,
// 2 config error.

#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "medsim.h"

namespace {

int exit_code(medsim_status status) {
  if (status == MEDSIM_OK) return 0;
  if (status == MEDSIM_ERR_CONFIG) return 2;
  return 1;
}

int report(medsim_status status) {
  if (status != MEDSIM_OK)
    std::fprintf(stderr, "medsim: error: %s\n", medsim_last_error());
  return exit_code(status);
}

struct EngineHandle {
  medsim_engine* ptr = nullptr;
  ~EngineHandle() { medsim_engine_free(ptr); }
};

struct ModelHandle {
  medsim_model* ptr = nullptr;
  ~ModelHandle() { medsim_model_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medsim - drug semantic similarity engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("medsim ") + medsim_version());

  std::string config_path, out_path, pairs_path, features_path, model_path;
  std::string mode = "hierarchy", kind = "forest", holdout, cv_report;
  std::string grid_path, drug, drug_a, drug_b, dump_vectors, dump_bm25;
  double threshold = 0.85, compare_r = 0.0;
  bool all_pairs = false;

  auto* validate = app.add_subcommand("validate", "ingest all data and print a summary");
  validate->add_option("--config", config_path)->required();

  auto* embed = app.add_subcommand("embed", "train embeddings and write embeddings.tsv");
  embed->add_option("--config", config_path)->required();
  embed->add_option("--mode", mode)->check(CLI::IsMember({"hierarchy", "text"}));
  embed->add_option("--out", out_path)->required();

  auto* featurize = app.add_subcommand("featurize", "compute pair features into features.tsv");
  featurize->add_option("--config", config_path)->required();
  featurize->add_option("--pairs", pairs_path);
  featurize->add_flag("--all-pairs", all_pairs, "every unordered store pair, no gold scores");
  featurize->add_option("--out", out_path)->required();
  featurize->add_option("--dump-vectors", dump_vectors, "also write sparse vectors.tsv");
  featurize->add_option("--dump-bm25", dump_bm25, "also write the bm25_index.json cache");

  auto* train = app.add_subcommand("train", "train a model from features.tsv");
  train->add_option("--features", features_path)->required();
  train->add_option("--out", out_path)->required();
  train->add_option("--config", config_path, "hyperparameters/seed (defaults when omitted)");
  train->add_option("--kind", kind)->check(CLI::IsMember({"forest", "linear", "tree"}));
  train->add_option("--holdout-drug", holdout, "exclude all pairs containing this drug id");
  train->add_option("--cv-report", cv_report, "write pooled k-fold CV metrics to this file");

  auto* evaluate = app.add_subcommand("evaluate", "score a model against labeled features");
  evaluate->add_option("--model", model_path)->required();
  evaluate->add_option("--features", features_path)->required();
  evaluate->add_option("--out", out_path)->required();
  auto* compare_opt =
      evaluate->add_option("--compare-r", compare_r,
                           "reference Pearson for the Fisher z significance test");

  auto* score = app.add_subcommand("score", "similarity of two drugs");
  score->add_option("--config", config_path)->required();
  score->add_option("--model", model_path)->required();
  score->add_option("drug_a", drug_a)->required();
  score->add_option("drug_b", drug_b)->required();

  auto* rank = app.add_subcommand("rank", "rank substitution candidates for a drug");
  rank->add_option("--config", config_path)->required();
  rank->add_option("--model", model_path)->required();
  rank->add_option("--drug", drug)->required();
  rank->add_option("--threshold", threshold, "suggestion threshold (default 0.85)");

  auto* ablate = app.add_subcommand("ablate", "cross-validate feature subsets from grid.json");
  ablate->add_option("--config", config_path)->required();
  ablate->add_option("--grid", grid_path)->required();
  ablate->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  auto open_engine = [&](EngineHandle& engine) {
    return medsim_engine_open(config_path.c_str(), &engine.ptr);
  };
  auto open_model = [&](ModelHandle& model) {
    return medsim_model_open(model_path.c_str(), &model.ptr);
  };

  if (*validate) {
    EngineHandle engine;
    medsim_status status = open_engine(engine);
    if (status != MEDSIM_OK) return report(status);
    char* summary = nullptr;
    status = medsim_engine_validate(engine.ptr, &summary);
    if (status == MEDSIM_OK) {
      std::fputs(summary, stdout);
      medsim_string_free(summary);
      std::puts("ok");
    }
    return report(status);
  }

  if (*embed) {
    EngineHandle engine;
    medsim_status status = open_engine(engine);
    if (status != MEDSIM_OK) return report(status);
    return report(medsim_engine_write_embeddings(engine.ptr, mode.c_str(), out_path.c_str()));
  }

  if (*featurize) {
    EngineHandle engine;
    medsim_status status = open_engine(engine);
    if (status != MEDSIM_OK) return report(status);
    status = medsim_engine_featurize(engine.ptr,
                                     pairs_path.empty() ? nullptr : pairs_path.c_str(),
                                     all_pairs ? 1 : 0, out_path.c_str());
    if (status == MEDSIM_OK && !dump_vectors.empty())
      status = medsim_engine_dump_vectors(engine.ptr, dump_vectors.c_str());
    if (status == MEDSIM_OK && !dump_bm25.empty())
      status = medsim_engine_dump_bm25(engine.ptr, dump_bm25.c_str());
    return report(status);
  }

  if (*train) {
    return report(medsim_train(config_path.empty() ? nullptr : config_path.c_str(),
                               features_path.c_str(), kind.c_str(),
                               holdout.empty() ? nullptr : holdout.c_str(),
                               cv_report.empty() ? nullptr : cv_report.c_str(),
                               out_path.c_str()));
  }

  if (*evaluate) {
    ModelHandle model;
    medsim_status status = open_model(model);
    if (status != MEDSIM_OK) return report(status);
    const double* reference = compare_opt->count() > 0 ? &compare_r : nullptr;
    return report(medsim_evaluate(model.ptr, features_path.c_str(), reference,
                                  out_path.c_str()));
  }

  if (*score) {
    EngineHandle engine;
    ModelHandle model;
    medsim_status status = open_engine(engine);
    if (status == MEDSIM_OK) status = open_model(model);
    double value = 0.0;
    if (status == MEDSIM_OK)
      status = medsim_score(engine.ptr, model.ptr, drug_a.c_str(), drug_b.c_str(), &value);
    if (status == MEDSIM_OK) std::printf("%.6f\n", value);
    return report(status);
  }

  if (*rank) {
    EngineHandle engine;
    ModelHandle model;
    medsim_status status = open_engine(engine);
    if (status == MEDSIM_OK) status = open_model(model);
    medsim_ranking* ranking = nullptr;
    if (status == MEDSIM_OK)
      status = medsim_rank(engine.ptr, model.ptr, drug.c_str(), threshold, &ranking);
    if (status == MEDSIM_OK) {
      std::printf("# rank\tdrug\tscore\tsubstitute\n");
      for (size_t i = 0; i < medsim_ranking_size(ranking); ++i)
        std::printf("%zu\t%s\t%.6f\t%s\n", i + 1, medsim_ranking_id(ranking, i),
                    medsim_ranking_score(ranking, i),
                    medsim_ranking_suggested(ranking, i) ? "yes" : "no");
      medsim_ranking_free(ranking);
    }
    return report(status);
  }

  if (*ablate) {
    EngineHandle engine;
    medsim_status status = open_engine(engine);
    if (status != MEDSIM_OK) return report(status);
    return report(medsim_engine_ablate(engine.ptr, grid_path.c_str(), out_path.c_str()));
  }

  return 2;
}
