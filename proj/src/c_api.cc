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

#include "biasd/biasd.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.h"
#include "csv.h"
#include "dynamics.h"
#include "error.h"
#include "experiment.h"
#include "gulm.h"
#include "ingest.h"
#include "log.h"
#include "metrics.h"
#include "recommender.h"
#include "rng.h"
#include "synthgen.h"
#include "validate.h"

struct biasd_dataset {
  biasd::Dataset data;
  // Present only for ingested datasets.
  std::optional<biasd::MovieLensDataset> movielens;
};

struct biasd_recs {
  biasd::RecommendationSet recs;
};

struct biasd_experiment {
  biasd::KeyValueConfig kv;
};

namespace {

thread_local std::string g_last_error;

biasd_status Fail(biasd_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
biasd_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BIASD_OK;
  } catch (const biasd::Error& e) {
    return Fail(static_cast<biasd_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(BIASD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(BIASD_ERR_INTERNAL, e.what());
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw biasd::Error(biasd::ErrorCode::kInvalidArgument, what);
}

std::ifstream OpenIn(const char* path) {
  Require(path != nullptr, "null path");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw biasd::Error(biasd::ErrorCode::kIo, std::string("cannot read ") + path);
  return in;
}

std::ofstream OpenOut(const char* path) {
  Require(path != nullptr, "null path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw biasd::Error(biasd::ErrorCode::kIo, std::string("cannot write ") + path);
  return out;
}

void Close(std::ofstream& out, const char* path) {
  out.close();
  if (!out) throw biasd::Error(biasd::ErrorCode::kIo, std::string("write failed: ") + path);
}

biasd::SyntheticConfig ToSynth(const biasd_synth_config* c) {
  Require(c != nullptr, "null config");
  biasd::SyntheticConfig s;
  s.n_users = c->n_users;
  s.n_items = c->n_items;
  s.group_fraction = c->group_fraction;
  s.category_fraction = c->category_fraction;
  s.rho1 = c->rho1;
  s.rho2 = c->rho2;
  s.density = c->density;
  s.seed = c->seed;
  return s;
}

void CopyOut(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed != nullptr) *needed = s.size();
  if (buf != nullptr && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

void CheckGroupCategory(const biasd_dataset* ds, uint32_t g, uint32_t c) {
  Require(ds != nullptr, "null dataset");
  if (g >= ds->data.labels.n_groups() || c >= ds->data.labels.n_categories()) {
    throw biasd::Error(biasd::ErrorCode::kInvalidArgument,
                       "group or category out of range");
  }
}

}  // namespace

extern "C" {

const char* biasd_version(void) { return biasd::kLibraryVersion; }

const char* biasd_rng_algorithm(void) { return biasd::kRngAlgorithm; }

const char* biasd_status_string(biasd_status status) {
  switch (status) {
    case BIASD_OK: return "ok";
    case BIASD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BIASD_ERR_IO: return "i/o error";
    case BIASD_ERR_PARSE: return "parse error";
    case BIASD_ERR_EMPTY_GROUP_ACTIVITY: return "empty group activity";
    case BIASD_ERR_ZERO_INPUT_BIAS: return "zero input bias";
    case BIASD_ERR_CONFIG_INFEASIBLE: return "infeasible configuration";
    case BIASD_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case BIASD_ERR_ALREADY_SELECTED: return "item already selected";
    case BIASD_ERR_INSUFFICIENT_GROUP: return "insufficient group size";
    case BIASD_ERR_UNSUPPORTED: return "unsupported";
    case BIASD_ERR_VALIDATION_FAILED: return "validation failed";
    case BIASD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* biasd_last_error(void) { return g_last_error.c_str(); }

void biasd_set_log_callback(biasd_line_fn fn, void* user) {
  if (fn == nullptr) {
    biasd::SetLogSink(nullptr);
    return;
  }
  biasd::SetLogSink([fn, user](std::string_view line) {
    const std::string s(line);
    fn(s.c_str(), user);
  });
}

// ---- synthetic ------------------------------------------------------------

void biasd_synth_config_init(biasd_synth_config* cfg) {
  if (cfg == nullptr) return;
  const biasd::SyntheticConfig d;
  cfg->n_users = d.n_users;
  cfg->n_items = d.n_items;
  cfg->group_fraction = d.group_fraction;
  cfg->category_fraction = d.category_fraction;
  cfg->rho1 = d.rho1;
  cfg->rho2 = d.rho2;
  cfg->density = d.density;
  cfg->seed = d.seed;
}

biasd_status biasd_synth_describe(const biasd_synth_config* cfg, char* buf,
                                  size_t cap, size_t* needed) {
  return Guard([&] {
    CopyOut(biasd::Describe(ToSynth(cfg)), buf, cap, needed);
  });
}

biasd_status biasd_generate(const biasd_synth_config* cfg, biasd_dataset** out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    auto ds = std::make_unique<biasd_dataset>();
    ds->data = biasd::Generate(ToSynth(cfg));
    *out = ds.release();
  });
}

// ---- datasets -------------------------------------------------------------

biasd_status biasd_dataset_load(const char* data_path,
                                const char* categories_path,
                                biasd_dataset** out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    auto data_in = OpenIn(data_path);
    auto cats_in = OpenIn(categories_path);
    auto ds = std::make_unique<biasd_dataset>();
    ds->data = biasd::ReadDataset(data_in, cats_in);
    *out = ds.release();
  });
}

biasd_status biasd_dataset_save(const biasd_dataset* ds, const char* data_path,
                                const char* categories_path) {
  return Guard([&] {
    Require(ds != nullptr, "null dataset");
    auto data_out = OpenOut(data_path);
    auto cats_out = OpenOut(categories_path);
    biasd::WriteDataset(ds->data, data_out, cats_out);
    Close(data_out, data_path);
    Close(cats_out, categories_path);
  });
}

biasd_status biasd_dataset_info(const biasd_dataset* ds, size_t* n_users,
                                size_t* n_items, size_t* n_groups,
                                size_t* n_categories, int64_t* n_selections) {
  return Guard([&] {
    Require(ds != nullptr, "null dataset");
    if (n_users) *n_users = ds->data.matrix.n_users();
    if (n_items) *n_items = ds->data.matrix.n_items();
    if (n_groups) *n_groups = ds->data.labels.n_groups();
    if (n_categories) *n_categories = ds->data.labels.n_categories();
    if (n_selections) *n_selections = ds->data.matrix.NumSelections();
  });
}

void biasd_dataset_free(biasd_dataset* ds) { delete ds; }

// ---- metrics --------------------------------------------------------------

biasd_status biasd_preference_ratio(const biasd_dataset* ds, uint32_t group,
                                    uint32_t category, double* out) {
  return Guard([&] {
    CheckGroupCategory(ds, group, category);
    Require(out != nullptr, "null output");
    *out = biasd::PreferenceRatio(ds->data.matrix, ds->data.labels, group, category);
  });
}

biasd_status biasd_category_prior(const biasd_dataset* ds, uint32_t category,
                                  double* out) {
  return Guard([&] {
    CheckGroupCategory(ds, 0, category);
    Require(out != nullptr, "null output");
    *out = biasd::CategoryPrior(ds->data.labels, category);
  });
}

biasd_status biasd_bias(const biasd_dataset* ds, uint32_t group,
                        uint32_t category, double* out) {
  return Guard([&] {
    CheckGroupCategory(ds, group, category);
    Require(out != nullptr, "null output");
    *out = biasd::Bias(ds->data.matrix, ds->data.labels, group, category);
  });
}

biasd_status biasd_bias_disparity(double bias_input, double bias_output,
                                  double* out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    *out = biasd::BiasDisparity(bias_input, bias_output);
  });
}

biasd_status biasd_report_write(const biasd_dataset* ds, const biasd_recs* recs,
                                const char* path) {
  return Guard([&] {
    Require(ds != nullptr && recs != nullptr, "null handle");
    const auto report = biasd::MakeBiasReport(
        ds->data.matrix, biasd::ToInteractionMatrix(recs->recs), ds->data.labels);
    auto out = OpenOut(path);
    biasd::WriteBiasReportCsv(report, out);
    Close(out, path);
  });
}

// ---- recommendation -------------------------------------------------------

biasd_status biasd_recommend(const biasd_dataset* ds, uint32_t k, uint32_t r,
                             uint32_t threads, biasd_recs** out) {
  return Guard([&] {
    Require(ds != nullptr && out != nullptr, "null handle");
    auto recs = std::make_unique<biasd_recs>();
    recs->recs = biasd::Recommend(ds->data.matrix, {.k = k, .r = r, .threads = threads});
    *out = recs.release();
  });
}

biasd_status biasd_recs_save(const biasd_recs* recs, const char* path) {
  return Guard([&] {
    Require(recs != nullptr, "null recommendations");
    auto out = OpenOut(path);
    biasd::WriteRecommendationsCsv(recs->recs, out);
    Close(out, path);
  });
}

biasd_status biasd_recs_load(const biasd_dataset* ds, const char* path,
                             biasd_recs** out) {
  return Guard([&] {
    Require(ds != nullptr && out != nullptr, "null handle");
    auto in = OpenIn(path);
    auto recs = std::make_unique<biasd_recs>();
    recs->recs = biasd::ReadRecommendationsCsv(in, ds->data.matrix.n_users(),
                                               ds->data.matrix.n_items());
    *out = recs.release();
  });
}

biasd_status biasd_recs_user(const biasd_recs* recs, uint32_t user,
                             uint32_t* items, double* utilities, size_t cap,
                             size_t* count) {
  return Guard([&] {
    Require(recs != nullptr, "null recommendations");
    Require(user < recs->recs.n_users(), "user out of range");
    const auto list = recs->recs.Recommended(user);
    if (count) *count = list.size();
    for (size_t i = 0; i < list.size() && i < cap; ++i) {
      if (items) items[i] = list[i].item;
      if (utilities) utilities[i] = list[i].utility;
    }
  });
}

biasd_status biasd_candidate_preference_ratio(const biasd_dataset* ds,
                                              const biasd_recs* recs,
                                              uint32_t group,
                                              uint32_t category, double* out) {
  return Guard([&] {
    CheckGroupCategory(ds, group, category);
    Require(recs != nullptr && out != nullptr, "null handle");
    if (!recs->recs.has_full_candidates()) {
      throw biasd::Error(biasd::ErrorCode::kUnsupported,
                         "recommendations carry no candidate lists");
    }
    *out = biasd::PreferenceRatio(biasd::CountCandidates(recs->recs, ds->data.labels),
                                  group, category);
  });
}

void biasd_recs_free(biasd_recs* recs) { delete recs; }

// ---- GULM -----------------------------------------------------------------

biasd_status biasd_rerank(const biasd_dataset* ds, const biasd_recs* recs,
                          biasd_recs** out, const char* plan_path) {
  return Guard([&] {
    Require(ds != nullptr && recs != nullptr && out != nullptr, "null handle");
    auto result = biasd::Rerank(recs->recs, ds->data.matrix, ds->data.labels);
    if (plan_path != nullptr) {
      auto plan_out = OpenOut(plan_path);
      biasd::WriteRerankPlanCsv(result.plan, plan_out);
      Close(plan_out, plan_path);
    }
    auto h = std::make_unique<biasd_recs>();
    h->recs = std::move(result.recs);
    *out = h.release();
  });
}

// ---- dynamics -------------------------------------------------------------

void biasd_dynamics_config_init(biasd_dynamics_config* cfg) {
  if (cfg == nullptr) return;
  const biasd::DynamicsConfig d;
  cfg->iterations = static_cast<uint32_t>(d.iterations);
  cfg->k = static_cast<uint32_t>(d.k);
  cfg->r = static_cast<uint32_t>(d.r);
  cfg->seed = d.seed;
  cfg->use_gulm = 0;
  cfg->threads = static_cast<uint32_t>(d.threads);
}

biasd_status biasd_dynamics_run(const biasd_dataset* ds,
                                const biasd_dynamics_config* cfg,
                                const char* trajectory_path) {
  return Guard([&] {
    Require(ds != nullptr && cfg != nullptr, "null handle");
    biasd::DynamicsConfig d;
    d.iterations = cfg->iterations;
    d.k = cfg->k;
    d.r = cfg->r;
    d.seed = cfg->seed;
    d.reranker = cfg->use_gulm ? biasd::Reranker::kGulm : biasd::Reranker::kNone;
    d.threads = cfg->threads;
    const auto traj = biasd::RunDynamics(ds->data.matrix, ds->data.labels, d);
    auto out = OpenOut(trajectory_path);
    biasd::WriteTrajectoryCsv(traj, out);
    Close(out, trajectory_path);
  });
}

// ---- MovieLens ------------------------------------------------------------

void biasd_ingest_config_init(biasd_ingest_config* cfg) {
  if (cfg == nullptr) return;
  const biasd::BuildOptions d;
  cfg->ratings_path = nullptr;
  cfg->movies_path = nullptr;
  cfg->users_path = nullptr;
  cfg->genre_a = nullptr;
  cfg->genre_b = nullptr;
  cfg->min_ratings = static_cast<uint32_t>(d.min_ratings);
  cfg->min_rating_value = d.min_rating_value;
}

biasd_status biasd_ingest_movielens(const biasd_ingest_config* cfg,
                                    biasd_dataset** out) {
  return Guard([&] {
    Require(cfg != nullptr && out != nullptr, "null handle");
    auto ratings_in = OpenIn(cfg->ratings_path);
    auto movies_in = OpenIn(cfg->movies_path);
    auto users_in = OpenIn(cfg->users_path);
    biasd::BuildOptions opt;
    if (cfg->genre_a) opt.genre_a = cfg->genre_a;
    if (cfg->genre_b) opt.genre_b = cfg->genre_b;
    opt.min_ratings = cfg->min_ratings;
    opt.min_rating_value = cfg->min_rating_value;
    auto ds = std::make_unique<biasd_dataset>();
    ds->movielens = biasd::BuildDataset(biasd::ParseRatings(ratings_in),
                                        biasd::ParseMovies(movies_in),
                                        biasd::ParseUsers(users_in), opt);
    ds->data = ds->movielens->data;
    *out = ds.release();
  });
}

biasd_status biasd_balance_groups(const biasd_dataset* ds, uint64_t seed,
                                  biasd_dataset** out) {
  return Guard([&] {
    Require(ds != nullptr && out != nullptr, "null handle");
    biasd::MovieLensDataset src;
    if (ds->movielens) {
      src = *ds->movielens;
    } else {
      src.data = ds->data;
    }
    auto h = std::make_unique<biasd_dataset>();
    auto balanced = biasd::BalanceGroups(src, seed);
    h->data = balanced.data;
    if (ds->movielens) h->movielens = std::move(balanced);
    *out = h.release();
  });
}

biasd_status biasd_dataset_write_id_map(const biasd_dataset* ds,
                                        const char* path) {
  return Guard([&] {
    Require(ds != nullptr, "null dataset");
    if (!ds->movielens) {
      throw biasd::Error(biasd::ErrorCode::kUnsupported,
                         "dataset has no external ids");
    }
    auto out = OpenOut(path);
    biasd::WriteIdMapCsv(*ds->movielens, out);
    Close(out, path);
  });
}

// ---- experiments ----------------------------------------------------------

const char* biasd_experiment_kind_name(size_t index) {
  const auto& kinds = biasd::AllKinds();
  return index < kinds.size() ? biasd::KindName(kinds[index]) : nullptr;
}

biasd_status biasd_experiment_new(biasd_experiment** out) {
  return Guard([&] {
    Require(out != nullptr, "null output");
    *out = new biasd_experiment();
  });
}

biasd_status biasd_experiment_load_file(biasd_experiment* exp, const char* path) {
  return Guard([&] {
    Require(exp != nullptr && path != nullptr, "null handle");
    const auto loaded = biasd::KeyValueConfig::Load(path);
    for (const auto& [k, v] : loaded.values()) exp->kv.Set(k, v);
  });
}

biasd_status biasd_experiment_load_manifest(biasd_experiment* exp,
                                            const char* path) {
  return Guard([&] {
    Require(exp != nullptr && path != nullptr, "null handle");
    exp->kv = biasd::LoadManifestConfig(path).ToKeyValues();
  });
}

biasd_status biasd_experiment_set(biasd_experiment* exp, const char* key,
                                  const char* value) {
  return Guard([&] {
    Require(exp != nullptr && key != nullptr && value != nullptr, "null argument");
    exp->kv.Set(key, value);
  });
}

biasd_status biasd_experiment_get(const biasd_experiment* exp, const char* key,
                                  char* buf, size_t cap, size_t* needed) {
  return Guard([&] {
    Require(exp != nullptr && key != nullptr, "null argument");
    const auto v = exp->kv.Get(key);
    if (!v) {
      throw biasd::Error(biasd::ErrorCode::kInvalidArgument,
                         std::string("config key not set: ") + key);
    }
    CopyOut(*v, buf, cap, needed);
  });
}

biasd_status biasd_experiment_run(biasd_experiment* exp) {
  return Guard([&] {
    Require(exp != nullptr, "null handle");
    biasd::RunExperiment(biasd::ResolveConfig(exp->kv));
  });
}

void biasd_experiment_free(biasd_experiment* exp) { delete exp; }

biasd_status biasd_validate(const char* root_dir, const char* const* overrides,
                            size_t n_overrides, const char* const* only,
                            size_t n_only, uint32_t k, biasd_line_fn on_line,
                            void* user, int* all_passed) {
  return Guard([&] {
    Require(root_dir != nullptr, "null root");
    biasd::ValidationOptions opt;
    opt.k = k;
    const auto known = biasd::DefaultTolerances();
    for (size_t i = 0; i < n_overrides; ++i) {
      biasd::KeyValueConfig kv;
      kv.SetAssignment(overrides[i]);
      const auto& [name, text] = *kv.values().begin();
      if (!known.count(name)) {
        throw biasd::Error(biasd::ErrorCode::kInvalidArgument,
                           "unknown tolerance: " + name);
      }
      const auto v = biasd::ParseDouble(text);
      if (!v) {
        throw biasd::Error(biasd::ErrorCode::kInvalidArgument,
                           "bad tolerance value: " + text);
      }
      opt.tolerance_overrides[name] = *v;
    }
    for (size_t i = 0; i < n_only; ++i) opt.only.emplace_back(only[i]);
    const auto results = biasd::ValidateRuns(root_dir, opt);
    for (const auto& r : results) {
      if (on_line) on_line(biasd::FormatCriterion(r).c_str(), user);
    }
    if (all_passed) *all_passed = biasd::AllPassed(results) ? 1 : 0;
  });
}

}  // extern "C"
