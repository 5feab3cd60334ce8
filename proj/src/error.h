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

#ifndef BIASD_ERROR_H_
#define BIASD_ERROR_H_

#include <stdexcept>
#include <string>

namespace biasd {

// Mirrors biasd_status in the C API; values must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kIo = 2,
  kParse = 3,
  kEmptyGroupActivity = 4,
  kZeroInputBias = 5,
  kConfigInfeasible = 6,
  kDimensionMismatch = 7,
  kAlreadySelected = 8,
  kInsufficientGroup = 9,
  kUnsupported = 10,
  kValidationFailed = 11,
  kInternal = 12,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace biasd

#endif  // BIASD_ERROR_H_
