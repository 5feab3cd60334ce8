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

// Process-wide run log. Messages are dropped unless a sink is installed.

#ifndef BIASD_LOG_H_
#define BIASD_LOG_H_

#include <functional>
#include <string_view>

namespace biasd {

using LogSink = std::function<void(std::string_view)>;

// Installs `sink` (or clears it when empty). Thread-safe.
void SetLogSink(LogSink sink);

// Emits one line to the installed sink. Thread-safe; lines are never
// interleaved.
void LogLine(std::string_view line);

}  // namespace biasd

#endif  // BIASD_LOG_H_
