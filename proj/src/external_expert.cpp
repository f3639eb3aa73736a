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

#include "caprank/external_expert.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <mutex>
#include <poll.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>
#include <utility>

#include <nlohmann/json.hpp>

#include "caprank/error.hpp"
#include "caprank/log.hpp"

namespace caprank {

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::size_t kStderrKeep = 2048;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

std::string describe_status(int status) {
  if (WIFEXITED(status)) return "exited with status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "killed by signal " + std::to_string(WTERMSIG(status));
  return "stopped";
}

std::string abbreviate(std::string_view s, std::size_t n = 60) {
  if (s.size() <= n) return std::string(s);
  return std::string(s.substr(0, n)) + "...";
}

}  // namespace

std::vector<std::string> split_command_line(std::string_view command) {
  std::vector<std::string> argv;
  std::string cur;
  bool in_word = false;
  for (std::size_t i = 0; i < command.size(); ++i) {
    const char c = command[i];
    if (c == '\'') {
      in_word = true;
      auto end = command.find('\'', i + 1);
      if (end == std::string_view::npos) throw DataError("unterminated ' in command line");
      cur.append(command.substr(i + 1, end - i - 1));
      i = end;
    } else if (c == '"') {
      in_word = true;
      for (++i; i < command.size() && command[i] != '"'; ++i) {
        if (command[i] == '\\' && i + 1 < command.size()) ++i;
        cur.push_back(command[i]);
      }
      if (i >= command.size()) throw DataError("unterminated \" in command line");
    } else if (c == '\\' && i + 1 < command.size()) {
      in_word = true;
      cur.push_back(command[++i]);
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) argv.push_back(std::move(cur));
      cur.clear();
      in_word = false;
    } else {
      in_word = true;
      cur.push_back(c);
    }
  }
  if (in_word) argv.push_back(std::move(cur));
  return argv;
}

ExternalExpertClient ExternalExpertClient::spawn(const std::string& command, int timeout_ms) {
  if (timeout_ms <= 0) throw std::invalid_argument("timeout_ms must be > 0");
  auto args = split_command_line(command);
  if (args.empty()) throw AdapterError("empty external expert command");
  ignore_sigpipe();

  int in_pipe[2], out_pipe[2], err_pipe[2], exec_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) || ::pipe2(out_pipe, O_CLOEXEC) ||
      ::pipe2(err_pipe, O_CLOEXEC) || ::pipe2(exec_pipe, O_CLOEXEC)) {
    throw AdapterError(std::string("pipe: ") + std::strerror(errno));
  }

  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw AdapterError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::execvp(argv[0], argv.data());
    const int err = errno;
    [[maybe_unused]] auto n = ::write(exec_pipe[1], &err, sizeof err);
    ::_exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  ::close(exec_pipe[1]);

  ExternalExpertClient client;
  client.command_ = command;
  client.timeout_ms_ = timeout_ms;
  client.pid_ = pid;
  client.to_child_ = in_pipe[1];
  client.from_child_ = out_pipe[0];
  client.child_err_ = err_pipe[0];

  int exec_errno = 0;
  ssize_t got;
  do {
    got = ::read(exec_pipe[0], &exec_errno, sizeof exec_errno);
  } while (got < 0 && errno == EINTR);
  ::close(exec_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    client.reap(true);
    throw AdapterError("cannot spawn external expert '" + command +
                       "': " + std::strerror(exec_errno));
  }

  nlohmann::ordered_json hello;
  hello["op"] = "hello";
  hello["version"] = kProtocolVersion;
  client.send_line(hello.dump());
  const auto reply_line = client.read_line("handshake");

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(reply_line);
  } catch (const nlohmann::json::exception&) {
    client.fail("malformed handshake reply: " + abbreviate(reply_line));
  }
  if (!reply.is_object() || !reply.contains("ok") || reply["ok"] != true) {
    client.fail("handshake rejected: " + abbreviate(reply_line));
  }
  auto version = reply.find("version");
  if (version == reply.end() || !version->is_number_integer()) {
    client.fail("handshake reply has no protocol version");
  }
  if (version->get<long>() != kProtocolVersion) {
    client.fail("adapter speaks protocol version " + std::to_string(version->get<long>()) +
                ", this client requires version " + std::to_string(kProtocolVersion));
  }
  if (auto n = reply.find("name"); n != reply.end() && n->is_string()) {
    client.name_ = n->get<std::string>();
  }
  logger()->info("external expert '{}' ready (pid {})", client.name_, pid);
  return client;
}

ExternalExpertClient::ExternalExpertClient(ExternalExpertClient&& other) noexcept {
  *this = std::move(other);
}

ExternalExpertClient& ExternalExpertClient::operator=(ExternalExpertClient&& other) noexcept {
  if (this != &other) {
    if (pid_ > 0) reap(true);
    command_ = std::move(other.command_);
    timeout_ms_ = other.timeout_ms_;
    pid_ = std::exchange(other.pid_, -1);
    to_child_ = std::exchange(other.to_child_, -1);
    from_child_ = std::exchange(other.from_child_, -1);
    child_err_ = std::exchange(other.child_err_, -1);
    out_buf_ = std::move(other.out_buf_);
    err_buf_ = std::move(other.err_buf_);
    name_ = std::move(other.name_);
    next_id_ = other.next_id_;
    broken_ = other.broken_;
  }
  return *this;
}

ExternalExpertClient::~ExternalExpertClient() {
  try {
    shutdown();
  } catch (...) {
  }
}

double ExternalExpertClient::score(std::string_view caption, std::string_view visual) {
  if (broken_ || pid_ <= 0) throw AdapterError("external expert connection is closed");
  const long id = next_id_++;
  nlohmann::ordered_json req;
  req["id"] = id;
  req["op"] = "score";
  req["caption"] = caption;
  req["visual"] = visual;
  send_line(req.dump());

  const std::string what =
      "scoring (\"" + abbreviate(caption) + "\", \"" + abbreviate(visual) + "\")";
  const auto line = read_line(what);
  nlohmann::json resp;
  try {
    resp = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    fail("protocol error " + what + ": malformed response " + abbreviate(line));
  }
  if (!resp.is_object()) fail("protocol error " + what + ": response is not an object");
  auto rid = resp.find("id");
  if (rid == resp.end() || !rid->is_number_integer() || rid->get<long>() != id) {
    fail("protocol error " + what + ": response id does not match request id " +
         std::to_string(id));
  }
  if (auto err = resp.find("error"); err != resp.end()) {
    throw AdapterError("external expert error " + what + ": " +
                       (err->is_string() ? err->get<std::string>() : err->dump()));
  }
  auto s = resp.find("score");
  if (s == resp.end() || !s->is_number() || !std::isfinite(s->get<double>())) {
    fail("protocol error " + what + ": response has no numeric score");
  }
  return s->get<double>();
}

void ExternalExpertClient::shutdown() {
  if (pid_ <= 0) return;
  if (!broken_) {
    try {
      send_line(R"({"op":"bye"})");
    } catch (const AdapterError&) {
    }
  }
  reap(false);
}

void ExternalExpertClient::send_line(const std::string& line) {
  std::string data = line + '\n';
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("connection to external expert lost: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string ExternalExpertClient::read_line(std::string_view what) {
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms_);
  for (;;) {
    if (auto nl = out_buf_.find('\n'); nl != std::string::npos) {
      std::string line = out_buf_.substr(0, nl);
      out_buf_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) {
      fail("external expert timed out after " + std::to_string(timeout_ms_) + " ms " +
           std::string(what));
    }
    pollfd fds[2] = {{from_child_, POLLIN, 0}, {child_err_, POLLIN, 0}};
    const int nfds = child_err_ >= 0 ? 2 : 1;
    const int rc = ::poll(fds, nfds, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      fail(std::string("poll: ") + std::strerror(errno));
    }
    if (nfds == 2 && (fds[1].revents & (POLLIN | POLLHUP))) drain_stderr();
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[4096];
      const ssize_t n = ::read(from_child_, buf, sizeof buf);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        // Pick up whatever the child said on its way out.
        drain_stderr();
        fail("external expert closed its output " + std::string(what));
      }
      out_buf_.append(buf, static_cast<std::size_t>(n));
    }
  }
}

void ExternalExpertClient::drain_stderr() {
  if (child_err_ < 0) return;
  pollfd pfd{child_err_, POLLIN, 0};
  while (::poll(&pfd, 1, 0) > 0 && (pfd.revents & (POLLIN | POLLHUP))) {
    char buf[1024];
    const ssize_t n = ::read(child_err_, buf, sizeof buf);
    if (n <= 0) {
      close_fd(child_err_);
      return;
    }
    err_buf_.append(buf, static_cast<std::size_t>(n));
    if (err_buf_.size() > kStderrKeep) err_buf_.erase(0, err_buf_.size() - kStderrKeep);
  }
}

std::string ExternalExpertClient::stderr_excerpt() const {
  std::string s = err_buf_;
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

void ExternalExpertClient::fail(const std::string& message) {
  broken_ = true;
  reap(true);
  std::string full = message + " [command: " + command_ + "]";
  if (auto excerpt = stderr_excerpt(); !excerpt.empty()) full += "; stderr: " + excerpt;
  throw AdapterError(full);
}

void ExternalExpertClient::reap(bool force) {
  close_fd(to_child_);
  if (pid_ > 0) {
    int status = 0;
    bool done = false;
    if (!force) {
      const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms_);
      while (Clock::now() < deadline) {
        const pid_t r = ::waitpid(pid_, &status, WNOHANG);
        if (r == pid_ || r < 0) {
          done = true;
          break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
      }
    }
    if (!done) {
      if (::waitpid(pid_, &status, WNOHANG) == 0) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
      }
    }
    if (!force && !(WIFEXITED(status) && WEXITSTATUS(status) == 0)) {
      logger()->warn("external expert '{}' {}", command_, describe_status(status));
    }
    pid_ = -1;
  }
  drain_stderr();
  close_fd(from_child_);
  close_fd(child_err_);
}

double external_expert_score(std::string_view caption, std::string_view visual_label,
                             ExternalExpertClient& client) {
  const double raw = client.score(caption, visual_label);
  if (raw < 0.0 || raw > 1.0) {
    const double clamped = std::clamp(raw, 0.0, 1.0);
    logger()->warn("external expert returned {} for (\"{}\", \"{}\"); clamped to {}", raw,
                   abbreviate(caption), abbreviate(visual_label), clamped);
    return clamped;
  }
  return raw;
}

}  // namespace caprank
