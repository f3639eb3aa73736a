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

#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace caprank {

inline constexpr int kProtocolVersion = 1;

// Splits a command line into argv. Whitespace separates words; single
// quotes are literal, double quotes allow backslash escapes. No expansion.
// Unbalanced quotes throw DataError.
std::vector<std::string> split_command_line(std::string_view command);

// A child process speaking the line-delimited JSON scoring protocol over its
// stdin/stdout:
//
//   -> {"op":"hello","version":1}
//   <- {"ok":true,"name":"...","version":1}
//   -> {"id":7,"op":"score","caption":"...","visual":"..."}
//   <- {"id":7,"score":0.42}   or   {"id":7,"error":"..."}
//   -> {"op":"bye"}                         (adapter exits 0)
//
// Requests are synchronous; one client talks to exactly one process. All
// failures throw AdapterError; messages carry an excerpt of the child's
// stderr when it has written any.
class ExternalExpertClient {
 public:
  // Starts the process and performs the handshake within timeout_ms.
  static ExternalExpertClient spawn(const std::string& command, int timeout_ms);

  ExternalExpertClient(ExternalExpertClient&& other) noexcept;
  ExternalExpertClient& operator=(ExternalExpertClient&& other) noexcept;
  ExternalExpertClient(const ExternalExpertClient&) = delete;
  ExternalExpertClient& operator=(const ExternalExpertClient&) = delete;
  ~ExternalExpertClient();

  // The adapter's raw answer; may lie outside [0, 1].
  double score(std::string_view caption, std::string_view visual);

  // Sends bye and reaps the child (killing it after the timeout).
  void shutdown();

  const std::string& name() const { return name_; }
  pid_t pid() const { return pid_; }

 private:
  ExternalExpertClient() = default;

  void send_line(const std::string& line);
  std::string read_line(std::string_view what);
  void drain_stderr();
  std::string stderr_excerpt() const;
  [[noreturn]] void fail(const std::string& message);
  void reap(bool force);

  std::string command_;
  int timeout_ms_ = 0;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  int child_err_ = -1;
  std::string out_buf_;
  std::string err_buf_;
  std::string name_;
  long next_id_ = 1;
  bool broken_ = false;
};

// Clamps the adapter's answer into [0, 1], logging a warning when it had to.
double external_expert_score(std::string_view caption, std::string_view visual_label,
                             ExternalExpertClient& client);

}  // namespace caprank
