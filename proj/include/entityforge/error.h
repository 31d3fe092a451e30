// Copyright 2026 The EntityForge Authors
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

#ifndef ENTITYFORGE_ERROR_H_
#define ENTITYFORGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace entityforge {

// Broad failure classes. The CLI maps kUsage/kConfig to exit code 2 and
// kData/kIo to exit code 3.
enum class ErrorCategory {
  kUsage,
  kConfig,
  kData,
  kIo,
};

std::string_view CategoryName(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string kind, const std::string& message)
      : std::runtime_error(message),
        category_(category),
        kind_(std::move(kind)) {}

  ErrorCategory category() const { return category_; }

  // Short machine-readable tag, e.g. "value-inflation".
  const std::string& kind() const { return kind_; }

 private:
  ErrorCategory category_;
  std::string kind_;
};

[[noreturn]] inline void ThrowData(std::string kind, const std::string& msg) {
  throw Error(ErrorCategory::kData, std::move(kind), msg);
}

[[noreturn]] inline void ThrowConfig(std::string kind, const std::string& msg) {
  throw Error(ErrorCategory::kConfig, std::move(kind), msg);
}

[[noreturn]] inline void ThrowUsage(std::string kind, const std::string& msg) {
  throw Error(ErrorCategory::kUsage, std::move(kind), msg);
}

[[noreturn]] inline void ThrowIo(std::string kind, const std::string& msg) {
  throw Error(ErrorCategory::kIo, std::move(kind), msg);
}

}  // namespace entityforge

#endif  // ENTITYFORGE_ERROR_H_
