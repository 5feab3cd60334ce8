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

// Experiment harness: parameter sweeps, feedback-loop runs and the MovieLens
// table, each written as CSV together with a JSON run manifest.
//
// Every run directory holds:
//   <kind>.csv          trial-averaged values
//   <kind>_trials.csv   per-trial raw values
//   manifest.json       resolved config, seeds, outputs
// MovieLens kinds additionally write the ingested dataset and id map.

#ifndef BIASD_EXPERIMENT_H_
#define BIASD_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "config.h"

namespace biasd {

inline constexpr const char* kLibraryVersion = "1.0.0";

enum class ExperimentKind {
  kSymmetricSweep,
  kAsymmetricSweep,
  kGroupSizeSweep,
  kCategorySizeSweep,
  kIterative,
  kIterativeGulm,
  kMovieLensTable,
  kMovieLensBalanced,
};

const char* KindName(ExperimentKind kind);
// Throws kInvalidArgument for unknown names.
ExperimentKind ParseKind(std::string_view name);
const std::vector<ExperimentKind>& AllKinds();

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSymmetricSweep;
  std::string scale = "paper";
  size_t trials = 10;
  uint64_t seed = 2018;
  size_t threads = 1;
  std::string out_dir = "out";

  size_t n_users = 1000;
  size_t n_items = 1000;
  double density = 0.05;
  size_t r = 10;
  std::vector<size_t> k_list;
  std::vector<double> rho_grid;
  double rho1 = 0.7;
  double rho2 = 0.7;
  std::vector<double> phi_grid;
  std::vector<double> theta_grid;
  size_t iterations = 5;
  size_t dynamics_k = 50;

  std::string movielens_dir;
  std::string movielens_sha256;  // expected digest of ratings.dat, optional
  size_t min_ratings = 90;
  std::string genre_a = "Action";
  std::string genre_b = "Romance";
  int min_rating_value = 1;
  size_t movielens_k = 50;

  // Canonical key/value form; ResolveConfig(ToKeyValues()) reproduces *this.
  KeyValueConfig ToKeyValues() const;
};

// Applies the scale preset and kind defaults, then the explicit keys. Unknown
// keys and malformed values throw kInvalidArgument.
ExperimentConfig ResolveConfig(const KeyValueConfig& kv);

// "0.50:0.05:1.00" (inclusive range) or "0.1,0.2".
std::vector<double> ParseGrid(std::string_view text);
std::string FormatGrid(const std::vector<double>& grid);

struct RunManifest {
  ExperimentConfig config;
  std::vector<uint64_t> trial_seeds;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;  // file names relative to out_dir

  std::string ToJson() const;
};

// Per-trial seeds derived from the root seed.
std::vector<uint64_t> TrialSeeds(uint64_t root, size_t trials);

// Runs one experiment into cfg.out_dir (created if missing) and writes
// manifest.json there. Config errors are raised before any work starts.
RunManifest RunExperiment(const ExperimentConfig& cfg);

// Loads the config stored in a manifest.json.
ExperimentConfig LoadManifestConfig(const std::string& manifest_path);

// Column contracts of the averaged CSVs.
inline constexpr const char* kSweepHeader =
    "k,rho1,rho2,phi,theta,group,category,pr_in,pr_out,bias_in,bias_out,"
    "bias_disparity,candidate_pr";
inline constexpr const char* kIterativeHeader =
    "rho,iteration,group,category,pr,bias,mean_accepted";

}  // namespace biasd

#endif  // BIASD_EXPERIMENT_H_
