// Copyright 2026 The vna Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VNA_SUBPROCESS_HPP
#define VNA_SUBPROCESS_HPP

#include <sys/types.h>

#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace vna::proc {

struct Result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs argv to completion, feeding `input` on stdin and capturing both
/// output streams.
Result run(const std::vector<std::string>& argv, const std::string& input = {});

/// Runs `command` through /bin/sh -c.
Result run_shell(const std::string& command);

/// A child process with piped stdin/stdout. stderr is drained on a
/// background thread and kept as a bounded tail for error messages.
class Process {
 public:
  enum Pipes : unsigned { kStdin = 1, kStdout = 2 };

  Process(const std::vector<std::string>& argv, unsigned pipes);
  ~Process();
  Process(const Process&) = delete;
  Process& operator=(const Process&) = delete;

  /// Writes all bytes; false if the child closed its end.
  bool write(std::span<const std::byte> data);
  /// Reads exactly data.size() bytes. Returns the count read, which is less
  /// only at end of stream.
  std::size_t read(std::span<std::byte> data);
  void close_stdin();
  int wait();
  std::string stderr_tail() const;

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  int err_fd_ = -1;
  bool waited_ = false;
  int status_ = -1;
  std::thread err_thread_;
  mutable std::mutex err_mutex_;
  std::string err_tail_;
};

std::string shell_quote(const std::string& s);

}  // namespace vna::proc

#endif  // VNA_SUBPROCESS_HPP
