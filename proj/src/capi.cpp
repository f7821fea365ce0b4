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

#include "medsim.h"

#include <cstring>
#include <new>
#include <string>

#include "medsim/config.hpp"
#include "medsim/pipeline.hpp"
#include "medsim/regression.hpp"

extern "C" {

struct medsim_engine {
  medsim::pipeline::Engine impl;
};

struct medsim_model {
  medsim::regress::Model impl;
};

struct medsim_ranking {
  medsim::pipeline::SubstitutionResult impl;
};

} // extern "C"

namespace {

thread_local std::string g_last_error;

medsim_status status_for(medsim::errc code) {
  using medsim::errc;
  switch (code) {
    case errc::config_error:
      return MEDSIM_ERR_CONFIG;
    case errc::io_error:
      return MEDSIM_ERR_IO;
    case errc::not_found:
      return MEDSIM_ERR_NOT_FOUND;
    case errc::ambiguous_name:
      return MEDSIM_ERR_AMBIGUOUS;
    case errc::invalid_argument:
      return MEDSIM_ERR_INVALID;
    default:
      return MEDSIM_ERR_DATA;
  }
}

template <typename Fn>
medsim_status guarded(Fn&& fn) {
  try {
    fn();
    return MEDSIM_OK;
  } catch (const medsim::Error& e) {
    g_last_error = std::string(medsim::errc_name(e.code())) + ": " + e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MEDSIM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MEDSIM_ERR_INTERNAL;
  }
}

medsim_status invalid(const char* message) {
  g_last_error = message;
  return MEDSIM_ERR_INVALID;
}

} // namespace

extern "C" {

const char* medsim_version(void) { return "0.1.0"; }

const char* medsim_last_error(void) { return g_last_error.c_str(); }

void medsim_string_free(char* s) { delete[] s; }

medsim_status medsim_engine_open(const char* config_path, medsim_engine** out) {
  if (!config_path || !out) return invalid("config_path and out must be non-NULL");
  *out = nullptr;
  return guarded([&] {
    medsim::Config cfg = medsim::load_config(config_path);
    *out = new medsim_engine{medsim::pipeline::Engine(std::move(cfg))};
  });
}

void medsim_engine_free(medsim_engine* engine) { delete engine; }

medsim_status medsim_engine_validate(medsim_engine* engine, char** summary_out) {
  if (!engine || !summary_out) return invalid("engine and summary_out must be non-NULL");
  *summary_out = nullptr;
  return guarded([&] {
    const std::string text = engine->impl.validate_summary().to_text();
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *summary_out = buffer;
  });
}

medsim_status medsim_engine_write_embeddings(medsim_engine* engine, const char* mode,
                                             const char* out_path) {
  if (!engine || !mode || !out_path)
    return invalid("engine, mode and out_path must be non-NULL");
  return guarded([&] {
    medsim::pipeline::write_embeddings_tsv(engine->impl,
                                           medsim::embed::mode_from_string(mode),
                                           out_path);
  });
}

medsim_status medsim_engine_featurize(medsim_engine* engine, const char* pairs_path,
                                      int all_pairs, const char* out_path) {
  if (!engine || !out_path) return invalid("engine and out_path must be non-NULL");
  return guarded([&] {
    auto& impl = engine->impl;
    const auto& names = impl.config().feature_selection;
    medsim::regress::PairFeatureTable table;
    if (all_pairs) {
      table = impl.features_all_pairs(names);
    } else if (pairs_path) {
      auto parsed = medsim::ingest::parse_pairs(pairs_path,
                                                impl.config().max_rater_range);
      table.feature_names = names;
      for (const auto& pair : parsed.kept)
        table.rows.push_back(
            impl.feature_row(pair.drug_a, pair.drug_b, names, pair.mean_score));
    } else {
      table = impl.features_for_labeled(names);
    }
    medsim::pipeline::write_features_tsv(table, out_path);
  });
}

medsim_status medsim_engine_dump_vectors(medsim_engine* engine, const char* out_path) {
  if (!engine || !out_path) return invalid("engine and out_path must be non-NULL");
  return guarded([&] { medsim::pipeline::write_vectors_tsv(engine->impl, out_path); });
}

medsim_status medsim_engine_dump_bm25(medsim_engine* engine, const char* out_path) {
  if (!engine || !out_path) return invalid("engine and out_path must be non-NULL");
  return guarded([&] { medsim::pipeline::write_bm25_cache(engine->impl, out_path); });
}

medsim_status medsim_engine_ablate(medsim_engine* engine, const char* grid_path,
                                   const char* out_path) {
  if (!engine || !grid_path || !out_path)
    return invalid("engine, grid_path and out_path must be non-NULL");
  return guarded([&] {
    auto grid = medsim::pipeline::read_grid_json(grid_path);
    auto entries = medsim::pipeline::run_ablation(engine->impl, grid);
    medsim::pipeline::write_ablation_tsv(entries, out_path);
  });
}

medsim_status medsim_train(const char* config_path, const char* features_path,
                           const char* kind, const char* holdout_drug,
                           const char* cv_report_path, const char* model_out) {
  if (!features_path || !kind || !model_out)
    return invalid("features_path, kind and model_out must be non-NULL");
  return guarded([&] {
    medsim::Config cfg = config_path ? medsim::load_config(config_path)
                                     : medsim::default_config();
    medsim::pipeline::TrainOptions options;
    options.kind = medsim::regress::model_kind_from_string(kind);
    if (holdout_drug) options.holdout_drug = holdout_drug;
    if (cv_report_path) options.cv_report_path = cv_report_path;

    auto features = medsim::pipeline::read_features_tsv(features_path);
    auto model = medsim::pipeline::train_from_features(features, cfg, options);
    medsim::regress::save_model(model, model_out);
  });
}

medsim_status medsim_model_open(const char* path, medsim_model** out) {
  if (!path || !out) return invalid("path and out must be non-NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new medsim_model{medsim::regress::load_model(path)};
  });
}

void medsim_model_free(medsim_model* model) { delete model; }

medsim_status medsim_evaluate(medsim_model* model, const char* features_path,
                              const double* compare_r, const char* report_out) {
  if (!model || !features_path || !report_out)
    return invalid("model, features_path and report_out must be non-NULL");
  return guarded([&] {
    auto features = medsim::pipeline::read_features_tsv(features_path);
    std::optional<double> reference;
    if (compare_r) reference = *compare_r;
    auto output = medsim::pipeline::evaluate_model(model->impl, features, reference);
    medsim::pipeline::write_report_json(
        output, medsim::regress::to_string(model->impl.kind), report_out);
  });
}

medsim_status medsim_score(medsim_engine* engine, medsim_model* model,
                           const char* drug_a, const char* drug_b, double* score_out) {
  if (!engine || !model || !drug_a || !drug_b || !score_out)
    return invalid("all arguments must be non-NULL");
  return guarded([&] {
    const auto& a = engine->impl.store().resolve(drug_a);
    const auto& b = engine->impl.store().resolve(drug_b);
    if (a.id == b.id)
      medsim::fail(medsim::errc::invalid_argument,
                   "cannot score drug '" + a.id + "' against itself");
    auto row = engine->impl.feature_row(std::min(a.id, b.id), std::max(a.id, b.id),
                                        model->impl.feature_names);
    *score_out = model->impl.predict_row(row);
  });
}

medsim_status medsim_rank(medsim_engine* engine, medsim_model* model,
                          const char* query, double threshold, medsim_ranking** out) {
  if (!engine || !model || !query || !out)
    return invalid("engine, model, query and out must be non-NULL");
  *out = nullptr;
  return guarded([&] {
    auto result = medsim::pipeline::rank_substitutes(engine->impl, model->impl,
                                                     query, threshold);
    *out = new medsim_ranking{std::move(result)};
  });
}

size_t medsim_ranking_size(const medsim_ranking* ranking) {
  return ranking ? ranking->impl.ranked.size() : 0;
}

const char* medsim_ranking_id(const medsim_ranking* ranking, size_t index) {
  if (!ranking || index >= ranking->impl.ranked.size()) return nullptr;
  return ranking->impl.ranked[index].id.c_str();
}

double medsim_ranking_score(const medsim_ranking* ranking, size_t index) {
  if (!ranking || index >= ranking->impl.ranked.size()) return 0.0;
  return ranking->impl.ranked[index].score;
}

int medsim_ranking_suggested(const medsim_ranking* ranking, size_t index) {
  if (!ranking || index >= ranking->impl.ranked.size()) return 0;
  return ranking->impl.ranked[index].suggested ? 1 : 0;
}

void medsim_ranking_free(medsim_ranking* ranking) { delete ranking; }

} // extern "C"
