// Copyright 2026 The biasd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the biasd library: bias measurement, user-based KNN
 * recommendation, GULM re-ranking, feedback-loop simulation, MovieLens
 * ingestion and the experiment harness.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a biasd_status; on failure a message is
 * available from biasd_last_error() on the calling thread.
 */

#ifndef BIASD_BIASD_H_
#define BIASD_BIASD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BIASD_BUILDING_LIBRARY)
#    define BIASD_API __declspec(dllexport)
#  else
#    define BIASD_API __declspec(dllimport)
#  endif
#else
#  define BIASD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum biasd_status {
  BIASD_OK = 0,
  BIASD_ERR_INVALID_ARGUMENT = 1,
  BIASD_ERR_IO = 2,
  BIASD_ERR_PARSE = 3,
  BIASD_ERR_EMPTY_GROUP_ACTIVITY = 4,
  BIASD_ERR_ZERO_INPUT_BIAS = 5,
  BIASD_ERR_CONFIG_INFEASIBLE = 6,
  BIASD_ERR_DIMENSION_MISMATCH = 7,
  BIASD_ERR_ALREADY_SELECTED = 8,
  BIASD_ERR_INSUFFICIENT_GROUP = 9,
  BIASD_ERR_UNSUPPORTED = 10,
  BIASD_ERR_VALIDATION_FAILED = 11,
  BIASD_ERR_INTERNAL = 12
} biasd_status;

typedef struct biasd_dataset biasd_dataset;       /* selections + labels */
typedef struct biasd_recs biasd_recs;             /* recommendation set */
typedef struct biasd_experiment biasd_experiment; /* experiment config */

BIASD_API const char* biasd_version(void);
BIASD_API const char* biasd_rng_algorithm(void);
BIASD_API const char* biasd_status_string(biasd_status status);

/* Message of the last failed call on this thread ("" if none). */
BIASD_API const char* biasd_last_error(void);

/* Run-log lines (short candidate lists, shortfalls, ingest counts...). Pass
 * NULL to silence. The callback may be invoked from worker threads, but
 * never concurrently. */
typedef void (*biasd_line_fn)(const char* line, void* user);
BIASD_API void biasd_set_log_callback(biasd_line_fn fn, void* user);

/* ---- Synthetic data ---------------------------------------------------- */

typedef struct biasd_synth_config {
  uint64_t n_users;
  uint64_t n_items;
  double group_fraction;    /* share of users in group 0 */
  double category_fraction; /* share of items in category 0 */
  double rho1;              /* group 0 preference for category 0 */
  double rho2;              /* group 1 preference for category 1 */
  double density;
  uint64_t seed;
} biasd_synth_config;

BIASD_API void biasd_synth_config_init(biasd_synth_config* cfg);

/* Writes "G1=.. G2=.. C1=.. C2=.. s=.." into buf (NUL-terminated, truncated
 * to cap). *needed receives the full length excluding the NUL. */
BIASD_API biasd_status biasd_synth_describe(const biasd_synth_config* cfg,
                                            char* buf, size_t cap,
                                            size_t* needed);

BIASD_API biasd_status biasd_generate(const biasd_synth_config* cfg,
                                      biasd_dataset** out);

/* ---- Datasets ---------------------------------------------------------- */

BIASD_API biasd_status biasd_dataset_load(const char* data_path,
                                          const char* categories_path,
                                          biasd_dataset** out);
BIASD_API biasd_status biasd_dataset_save(const biasd_dataset* ds,
                                          const char* data_path,
                                          const char* categories_path);
BIASD_API biasd_status biasd_dataset_info(const biasd_dataset* ds,
                                          size_t* n_users, size_t* n_items,
                                          size_t* n_groups,
                                          size_t* n_categories,
                                          int64_t* n_selections);
BIASD_API void biasd_dataset_free(biasd_dataset* ds);

/* ---- Metrics ----------------------------------------------------------- */

BIASD_API biasd_status biasd_preference_ratio(const biasd_dataset* ds,
                                              uint32_t group,
                                              uint32_t category, double* out);
BIASD_API biasd_status biasd_category_prior(const biasd_dataset* ds,
                                            uint32_t category, double* out);
BIASD_API biasd_status biasd_bias(const biasd_dataset* ds, uint32_t group,
                                  uint32_t category, double* out);
BIASD_API biasd_status biasd_bias_disparity(double bias_input,
                                            double bias_output, double* out);

/* Bias report CSV of `recs` against the dataset's selections. */
BIASD_API biasd_status biasd_report_write(const biasd_dataset* ds,
                                          const biasd_recs* recs,
                                          const char* path);

/* ---- Recommendation ---------------------------------------------------- */

/* threads = 0 uses hardware concurrency; output does not depend on it. */
BIASD_API biasd_status biasd_recommend(const biasd_dataset* ds, uint32_t k,
                                       uint32_t r, uint32_t threads,
                                       biasd_recs** out);
BIASD_API biasd_status biasd_recs_save(const biasd_recs* recs,
                                       const char* path);
/* Loads a `user,rank,item,utility` CSV; the result holds recommended items
 * only and cannot be re-ranked. */
BIASD_API biasd_status biasd_recs_load(const biasd_dataset* ds,
                                       const char* path, biasd_recs** out);
/* Copies up to `cap` recommended items of `user` in rank order; *count gets
 * the full number. Either array may be NULL. */
BIASD_API biasd_status biasd_recs_user(const biasd_recs* recs, uint32_t user,
                                       uint32_t* items, double* utilities,
                                       size_t cap, size_t* count);
/* Preference ratio over every user's nonzero-utility candidates. */
BIASD_API biasd_status biasd_candidate_preference_ratio(
    const biasd_dataset* ds, const biasd_recs* recs, uint32_t group,
    uint32_t category, double* out);
BIASD_API void biasd_recs_free(biasd_recs* recs);

/* ---- GULM re-ranking ---------------------------------------------------- */

/* Writes the plan CSV to plan_path when it is not NULL. */
BIASD_API biasd_status biasd_rerank(const biasd_dataset* ds,
                                    const biasd_recs* recs, biasd_recs** out,
                                    const char* plan_path);

/* ---- Feedback loop ------------------------------------------------------ */

typedef struct biasd_dynamics_config {
  uint32_t iterations;
  uint32_t k;
  uint32_t r;
  uint64_t seed;
  int use_gulm; /* nonzero: re-rank before acceptance */
  uint32_t threads;
} biasd_dynamics_config;

BIASD_API void biasd_dynamics_config_init(biasd_dynamics_config* cfg);
BIASD_API biasd_status biasd_dynamics_run(const biasd_dataset* ds,
                                          const biasd_dynamics_config* cfg,
                                          const char* trajectory_path);

/* ---- MovieLens ---------------------------------------------------------- */

typedef struct biasd_ingest_config {
  const char* ratings_path;
  const char* movies_path;
  const char* users_path;
  const char* genre_a; /* category 0, default "Action" when NULL */
  const char* genre_b; /* category 1, default "Romance" when NULL */
  uint32_t min_ratings;
  int32_t min_rating_value;
} biasd_ingest_config;

BIASD_API void biasd_ingest_config_init(biasd_ingest_config* cfg);
BIASD_API biasd_status biasd_ingest_movielens(const biasd_ingest_config* cfg,
                                              biasd_dataset** out);
/* Downsamples group 0 to the size of group 1. */
BIASD_API biasd_status biasd_balance_groups(const biasd_dataset* ds,
                                            uint64_t seed, biasd_dataset** out);
/* `internal_id,external_id,kind` CSV; only for ingested datasets. */
BIASD_API biasd_status biasd_dataset_write_id_map(const biasd_dataset* ds,
                                                  const char* path);

/* ---- Experiments -------------------------------------------------------- */

/* Experiment kind names by index; NULL past the end. */
BIASD_API const char* biasd_experiment_kind_name(size_t index);

BIASD_API biasd_status biasd_experiment_new(biasd_experiment** out);
/* Merges `key = value` lines from a config file. */
BIASD_API biasd_status biasd_experiment_load_file(biasd_experiment* exp,
                                                  const char* path);
/* Replaces the config with the one recorded in a manifest.json. */
BIASD_API biasd_status biasd_experiment_load_manifest(biasd_experiment* exp,
                                                      const char* path);
BIASD_API biasd_status biasd_experiment_set(biasd_experiment* exp,
                                            const char* key,
                                            const char* value);
/* Copies the raw value of `key` (NUL-terminated, truncated to cap);
 * *needed gets its full length. Fails with INVALID_ARGUMENT if unset. */
BIASD_API biasd_status biasd_experiment_get(const biasd_experiment* exp,
                                            const char* key, char* buf,
                                            size_t cap, size_t* needed);
/* Resolves the config and runs it, writing CSVs and manifest.json into the
 * configured output directory. */
BIASD_API biasd_status biasd_experiment_run(biasd_experiment* exp);
BIASD_API void biasd_experiment_free(biasd_experiment* exp);

/* Checks run outputs under root_dir (one sub-directory per kind). Each
 * criterion produces one line through on_line. overrides are "name=value"
 * tolerance assignments; `only` restricts the criterion ids. *all_passed is
 * set to 1 when every checked criterion passed. */
BIASD_API biasd_status biasd_validate(const char* root_dir,
                                      const char* const* overrides,
                                      size_t n_overrides,
                                      const char* const* only, size_t n_only,
                                      uint32_t k, biasd_line_fn on_line,
                                      void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* BIASD_BIASD_H_ */
