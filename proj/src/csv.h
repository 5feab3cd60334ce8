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

#ifndef BIASD_CSV_H_
#define BIASD_CSV_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace biasd {

// Fixed 6-decimal formatting used by every CSV this library writes.
std::string FormatFixed(double value);
std::string FormatFixed(const std::optional<double>& value);  // "NA" if empty

// Splits on `sep` without trimming; empty fields are preserved.
std::vector<std::string_view> Split(std::string_view text, char sep);
std::vector<std::string_view> Split(std::string_view text, std::string_view sep);

std::string_view Trim(std::string_view text);

// Locale-independent integer/double parsing of the whole field.
std::optional<int64_t> ParseInt(std::string_view text);
std::optional<uint64_t> ParseUint(std::string_view text);
std::optional<double> ParseDouble(std::string_view text);

}  // namespace biasd

#endif  // BIASD_CSV_H_
