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

#include "entityforge/log.h"

#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace entityforge {

void InitLogging() {
  auto logger = spdlog::stderr_color_mt("entityforge");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("ENTITYFORGE_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

}  // namespace entityforge
