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

#include "vna/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <optional>

#include "vna/error.hpp"

extern char** environ;

namespace vna::proc {

namespace {

constexpr std::size_t kErrTailBytes = 64 * 1024;

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fd, O_CLOEXEC) != 0) throw Error(ErrorCode::Io, std::string("pipe: ") + std::strerror(errno));
  }
};

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

pid_t spawn(const std::vector<std::string>& argv, int in_fd, int out_fd, int err_fd) {
  if (argv.empty()) throw Error(ErrorCode::Io, "spawn: empty argv");
  ignore_sigpipe();
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  if (in_fd >= 0) posix_spawn_file_actions_adddup2(&fa, in_fd, 0);
  if (out_fd >= 0) posix_spawn_file_actions_adddup2(&fa, out_fd, 1);
  if (err_fd >= 0) posix_spawn_file_actions_adddup2(&fa, err_fd, 2);
  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, args[0], &fa, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  if (rc != 0) {
    throw Error(ErrorCode::Io, "cannot start " + argv[0] + ": " + std::strerror(rc));
  }
  return pid;
}

}  // namespace

Result run(const std::vector<std::string>& argv, const std::string& input) {
  Pipe in, out, err;
  const pid_t pid = spawn(argv, in.fd[0], out.fd[1], err.fd[1]);
  ::close(in.fd[0]);
  ::close(out.fd[1]);
  ::close(err.fd[1]);

  Result r;
  std::size_t written = 0;
  int wfd = in.fd[1];
  if (input.empty()) close_fd(wfd);
  int fds[2] = {out.fd[0], err.fd[0]};
  std::string* sinks[2] = {&r.out, &r.err};
  char buf[65536];
  while (fds[0] >= 0 || fds[1] >= 0 || wfd >= 0) {
    pollfd p[3];
    int n = 0;
    int map[3];
    for (int i = 0; i < 2; ++i) {
      if (fds[i] >= 0) {
        p[n] = {fds[i], POLLIN, 0};
        map[n++] = i;
      }
    }
    if (wfd >= 0) {
      p[n] = {wfd, POLLOUT, 0};
      map[n++] = 2;
    }
    if (::poll(p, static_cast<nfds_t>(n), -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (int k = 0; k < n; ++k) {
      if (p[k].revents == 0) continue;
      if (map[k] == 2) {
        const ssize_t w = ::write(wfd, input.data() + written, input.size() - written);
        if (w > 0) written += static_cast<std::size_t>(w);
        if (w < 0 || written == input.size()) close_fd(wfd);
        continue;
      }
      const int i = map[k];
      const ssize_t got = ::read(fds[i], buf, sizeof buf);
      if (got > 0) {
        sinks[i]->append(buf, static_cast<std::size_t>(got));
      } else if (got == 0 || errno != EINTR) {
        close_fd(fds[i]);
      }
    }
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  r.exit_code = decode_status(status);
  return r;
}

Result run_shell(const std::string& command) { return run({"/bin/sh", "-c", command}); }

Process::Process(const std::vector<std::string>& argv, unsigned pipes) {
  Pipe err;
  std::optional<Pipe> in, out;
  if (pipes & kStdin) in.emplace();
  if (pipes & kStdout) out.emplace();
  int devnull = -1;
  if (!(pipes & kStdin) || !(pipes & kStdout)) devnull = ::open("/dev/null", O_RDWR | O_CLOEXEC);
  try {
    pid_ = spawn(argv, in ? in->fd[0] : devnull, out ? out->fd[1] : devnull, err.fd[1]);
  } catch (...) {
    if (devnull >= 0) ::close(devnull);
    for (int fd : {err.fd[0], err.fd[1]}) ::close(fd);
    if (in) ::close(in->fd[0]), ::close(in->fd[1]);
    if (out) ::close(out->fd[0]), ::close(out->fd[1]);
    throw;
  }
  if (devnull >= 0) ::close(devnull);
  ::close(err.fd[1]);
  err_fd_ = err.fd[0];
  if (in) {
    ::close(in->fd[0]);
    in_fd_ = in->fd[1];
  }
  if (out) {
    ::close(out->fd[1]);
    out_fd_ = out->fd[0];
  }
  err_thread_ = std::thread([this] {
    char buf[4096];
    for (;;) {
      const ssize_t got = ::read(err_fd_, buf, sizeof buf);
      if (got < 0 && errno == EINTR) continue;
      if (got <= 0) break;
      std::lock_guard lock(err_mutex_);
      err_tail_.append(buf, static_cast<std::size_t>(got));
      if (err_tail_.size() > kErrTailBytes) err_tail_.erase(0, err_tail_.size() - kErrTailBytes);
    }
  });
}

Process::~Process() {
  close_stdin();
  close_fd(out_fd_);
  if (!waited_ && pid_ > 0) {
    ::kill(pid_, SIGTERM);
    wait();
  }
  if (err_thread_.joinable()) err_thread_.join();
  close_fd(err_fd_);
}

bool Process::write(std::span<const std::byte> data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t w = ::write(in_fd_, data.data() + done, data.size() - done);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(w);
  }
  return true;
}

std::size_t Process::read(std::span<std::byte> data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t got = ::read(out_fd_, data.data() + done, data.size() - done);
    if (got < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (got == 0) break;
    done += static_cast<std::size_t>(got);
  }
  return done;
}

void Process::close_stdin() { close_fd(in_fd_); }

int Process::wait() {
  if (waited_) return status_;
  close_stdin();
  int status = 0;
  while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  waited_ = true;
  status_ = decode_status(status);
  if (err_thread_.joinable()) err_thread_.join();
  return status_;
}

std::string Process::stderr_tail() const {
  std::lock_guard lock(err_mutex_);
  constexpr std::size_t kShown = 2000;
  return err_tail_.size() > kShown ? err_tail_.substr(err_tail_.size() - kShown) : err_tail_;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace vna::proc
