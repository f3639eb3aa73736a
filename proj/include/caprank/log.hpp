// Copyright 2026 The caprank Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace caprank {

// Shared library logger. Level comes from CAPRANK_LOG (trace, debug, info,
// warn, error, off); default is warn. Output goes to stderr.
std::shared_ptr<spdlog::logger> logger();

// Replace the library logger (tests attach in-memory sinks).
void set_logger(std::shared_ptr<spdlog::logger> l);

}  // namespace caprank
