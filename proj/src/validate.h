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

// Checks experiment outputs against the reproduction criteria.
//
// `ValidateRuns` expects one sub-directory per experiment kind under a root
// directory (as written by `biasd experiment --kind all`). Every threshold is
// a named tolerance that can be overridden; overrides are logged.

#ifndef BIASD_VALIDATE_H_
#define BIASD_VALIDATE_H_

#include <map>
#include <string>
#include <vector>

namespace biasd {

enum class CriterionStatus { kPass, kFail, kNotRun };

struct CriterionResult {
  std::string id;
  std::string title;
  CriterionStatus status = CriterionStatus::kNotRun;
  std::string detail;
};

struct ValidationOptions {
  std::map<std::string, double> tolerance_overrides;
  // Criterion ids to check ("3".."10", "9c"); empty means all.
  std::vector<std::string> only;
  size_t k = 50;  // neighborhood size the sweep criteria are read at
};

std::map<std::string, double> DefaultTolerances();

// Throws kInvalidArgument for unknown tolerance names and kIo ("missing run")
// when a referenced run directory or CSV is absent.
std::vector<CriterionResult> ValidateRuns(const std::string& root,
                                          const ValidationOptions& options);

// "PASS  [3] title: detail"
std::string FormatCriterion(const CriterionResult& result);

bool AllPassed(const std::vector<CriterionResult>& results);

}  // namespace biasd

#endif  // BIASD_VALIDATE_H_
