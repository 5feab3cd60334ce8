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

// Flat `key = value` configuration files with `#` comments.

#ifndef BIASD_CONFIG_H_
#define BIASD_CONFIG_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace biasd {

class KeyValueConfig {
 public:
  // Throws kInvalidArgument naming the offending line.
  static KeyValueConfig Parse(std::string_view text);
  // Throws kIo if the file cannot be read.
  static KeyValueConfig Load(const std::string& path);

  void Set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  // Applies a "key=value" override.
  void SetAssignment(std::string_view assignment);

  std::optional<std::string> Get(const std::string& key) const;
  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  const std::map<std::string, std::string>& values() const { return values_; }

  // Serializes back to the file format, keys sorted.
  std::string ToText() const;

 private:
  std::map<std::string, std::string> values_;
};

// Reads a whole file; throws kIo.
std::string ReadTextFile(const std::string& path);
// Writes (replacing) a whole file; throws kIo.
void WriteTextFile(const std::string& path, std::string_view content);

}  // namespace biasd

#endif  // BIASD_CONFIG_H_
