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

#ifndef MEDSIM_H
#define MEDSIM_H

/*
 * C API of the medsim drug-similarity engine.
 *
 * All functions return a medsim_status; 0 means success. On failure,
 * medsim_last_error() returns a thread-local description of what went
 * wrong. Handles are opaque and must be released with their _free
 * function. A medsim_engine is immutable after open and safe to share
 * across threads for reads; rankings and strings are owned by the caller.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum medsim_status {
  MEDSIM_OK = 0,
  MEDSIM_ERR_CONFIG = 1,     /* bad config file or option */
  MEDSIM_ERR_DATA = 2,       /* malformed or inconsistent input data */
  MEDSIM_ERR_NOT_FOUND = 3,  /* unknown drug id or name */
  MEDSIM_ERR_AMBIGUOUS = 4,  /* name resolves to several drugs */
  MEDSIM_ERR_IO = 5,         /* file cannot be read or written */
  MEDSIM_ERR_INVALID = 6,    /* invalid argument (NULL handle, bad range) */
  MEDSIM_ERR_INTERNAL = 7
} medsim_status;

typedef struct medsim_engine medsim_engine;   /* store + feature producers */
typedef struct medsim_model medsim_model;     /* trained regression model */
typedef struct medsim_ranking medsim_ranking; /* substitution ranking */

const char* medsim_version(void);

/* Thread-local message for the most recent failure in this thread. */
const char* medsim_last_error(void);

void medsim_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Engine                                                              */

/* Loads the TOML config, ingests every configured data file and builds
 * the validated store. Embeddings and text indices are built lazily on
 * first use. */
medsim_status medsim_engine_open(const char* config_path, medsim_engine** out);
void medsim_engine_free(medsim_engine* engine);

/* Human-readable ingest/validation summary; free with medsim_string_free. */
medsim_status medsim_engine_validate(medsim_engine* engine, char** summary_out);

/* mode is "hierarchy" or "text"; writes embeddings.tsv. */
medsim_status medsim_engine_write_embeddings(medsim_engine* engine, const char* mode,
                                             const char* out_path);

/* Computes feature rows and writes features.tsv.
 *   pairs_path  labeled pairs file; NULL uses the config's data.pairs.
 *   all_pairs   nonzero ignores pairs files and emits every unordered
 *               store pair without gold scores. */
medsim_status medsim_engine_featurize(medsim_engine* engine, const char* pairs_path,
                                      int all_pairs, const char* out_path);

/* Debug dumps: IDF-weighted sparse vectors / BM25 index cache. */
medsim_status medsim_engine_dump_vectors(medsim_engine* engine, const char* out_path);
medsim_status medsim_engine_dump_bm25(medsim_engine* engine, const char* out_path);

/* Cross-validated metrics per feature subset in grid.json, written as TSV. */
medsim_status medsim_engine_ablate(medsim_engine* engine, const char* grid_path,
                                   const char* out_path);

/* ------------------------------------------------------------------ */
/* Training and evaluation (no engine needed; they work on files)      */

/* Trains on features.tsv rows.
 *   config_path  optional (NULL = defaults); supplies hyperparameters,
 *                seed and fold count.
 *   kind         "forest", "linear" or "tree".
 *   holdout_drug optional id; rows containing it are excluded from
 *                training and the exclusion is recorded in the model.
 *   cv_report    optional path for pooled k-fold CV metrics. */
medsim_status medsim_train(const char* config_path, const char* features_path,
                           const char* kind, const char* holdout_drug,
                           const char* cv_report_path, const char* model_out);

medsim_status medsim_model_open(const char* path, medsim_model** out);
void medsim_model_free(medsim_model* model);

/* Predicts every labeled row and writes report.json. compare_r, when
 * non-NULL, adds a Fisher z comparison of the model's Pearson against the
 * reference correlation. */
medsim_status medsim_evaluate(medsim_model* model, const char* features_path,
                              const double* compare_r, const char* report_out);

/* ------------------------------------------------------------------ */
/* Scoring                                                             */

/* Similarity of two drugs (ids or unique names) in [0,1]. */
medsim_status medsim_score(medsim_engine* engine, medsim_model* model,
                           const char* drug_a, const char* drug_b, double* score_out);

/* Ranks every other drug against the query, descending score. Candidates
 * strictly above the threshold are flagged as substitution suggestions. */
medsim_status medsim_rank(medsim_engine* engine, medsim_model* model,
                          const char* query, double threshold, medsim_ranking** out);

size_t medsim_ranking_size(const medsim_ranking* ranking);
const char* medsim_ranking_id(const medsim_ranking* ranking, size_t index);
double medsim_ranking_score(const medsim_ranking* ranking, size_t index);
int medsim_ranking_suggested(const medsim_ranking* ranking, size_t index);
void medsim_ranking_free(medsim_ranking* ranking);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MEDSIM_H */
