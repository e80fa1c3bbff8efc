// Copyright 2026 The mutafuzz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mutafuzz/common/subprocess.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/syscall.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <sstream>

extern char** environ;

namespace mutafuzz {
namespace {

constexpr std::size_t kMaxCapturedOutput = 1 << 20;
constexpr auto kTermGrace = std::chrono::milliseconds(200);

std::string ResolveExecutable(const std::string& name) {
  if (name.find('/') != std::string::npos) return name;
  const char* path = std::getenv("PATH");
  std::string dirs = path ? path : "/usr/local/bin:/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= dirs.size()) {
    std::size_t end = dirs.find(':', start);
    if (end == std::string::npos) end = dirs.size();
    std::string dir = dirs.substr(start, end - start);
    if (dir.empty()) dir = ".";
    std::string candidate = dir + "/" + name;
    if (access(candidate.c_str(), X_OK) == 0) return candidate;
    start = end + 1;
  }
  return name;
}

std::vector<std::string> BuildEnvironment(
    const std::map<std::string, std::string>& overrides) {
  std::vector<std::string> env;
  for (char** entry = environ; entry && *entry; ++entry) {
    std::string_view item(*entry);
    auto eq = item.find('=');
    std::string key(item.substr(0, eq));
    if (overrides.count(key) == 0) env.emplace_back(item);
  }
  for (const auto& [key, value] : overrides) env.push_back(key + "=" + value);
  return env;
}

int OpenPidFd(pid_t pid) {
#ifdef SYS_pidfd_open
  return static_cast<int>(syscall(SYS_pidfd_open, pid, 0));
#else
  (void)pid;
  return -1;
#endif
}

void DrainPipe(int fd, std::string& sink, bool& open) {
  char buffer[4096];
  while (true) {
    ssize_t n = read(fd, buffer, sizeof(buffer));
    if (n > 0) {
      if (sink.size() < kMaxCapturedOutput) {
        sink.append(buffer, static_cast<std::size_t>(n));
      }
      continue;
    }
    if (n == 0) open = false;
    return;  // EAGAIN or EOF
  }
}

}  // namespace

ProcessResult RunProcess(const ProcessSpec& spec) {
  ProcessResult result;
  if (spec.argv.empty()) return result;

  const std::string executable = ResolveExecutable(spec.argv[0]);
  std::vector<std::string> env_storage = BuildEnvironment(spec.env);
  std::vector<char*> argv;
  for (const auto& arg : spec.argv) argv.push_back(const_cast<char*>(arg.c_str()));
  argv.push_back(nullptr);
  std::vector<char*> envp;
  for (auto& item : env_storage) envp.push_back(item.data());
  envp.push_back(nullptr);
  const std::string cwd = spec.cwd.string();

  int output_pipe[2] = {-1, -1};
  if (spec.capture_output && pipe2(output_pipe, O_CLOEXEC) != 0) return result;
  int error_pipe[2];
  if (pipe2(error_pipe, O_CLOEXEC) != 0) return result;

  const auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    close(error_pipe[0]);
    close(error_pipe[1]);
    if (spec.capture_output) {
      close(output_pipe[0]);
      close(output_pipe[1]);
    }
    return result;
  }
  if (pid == 0) {
    // Only async-signal-safe calls from here on.
    setpgid(0, 0);
    signal(SIGPIPE, SIG_DFL);
    int devnull = open("/dev/null", O_RDWR);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    if (spec.capture_output) {
      dup2(output_pipe[1], STDOUT_FILENO);
      dup2(output_pipe[1], STDERR_FILENO);
    } else if (devnull >= 0) {
      dup2(devnull, STDOUT_FILENO);
      dup2(devnull, STDERR_FILENO);
    }
    if (!cwd.empty() && chdir(cwd.c_str()) != 0) {
      int err = errno;
      (void)!write(error_pipe[1], &err, sizeof(err));
      _exit(127);
    }
    execve(executable.c_str(), argv.data(), envp.data());
    int err = errno;
    (void)!write(error_pipe[1], &err, sizeof(err));
    _exit(127);
  }
  setpgid(pid, pid);
  close(error_pipe[1]);
  if (spec.capture_output) close(output_pipe[1]);

  int exec_errno = 0;
  ssize_t got = read(error_pipe[0], &exec_errno, sizeof(exec_errno));
  close(error_pipe[0]);
  result.spawned = got <= 0;

  int pidfd = OpenPidFd(pid);
  bool output_open = spec.capture_output;
  if (output_open) fcntl(output_pipe[0], F_SETFL, O_NONBLOCK);

  bool term_sent = false;
  std::chrono::steady_clock::time_point term_time;
  int status = 0;
  bool reaped = false;
  while (!reaped) {
    auto now = std::chrono::steady_clock::now();
    if (spec.timeout.count() > 0 && !term_sent && now - start >= spec.timeout) {
      result.timed_out = true;
      kill(-pid, SIGTERM);
      term_sent = true;
      term_time = now;
    }
    if (term_sent && now - term_time >= kTermGrace) kill(-pid, SIGKILL);

    pollfd fds[2];
    int nfds = 0;
    if (pidfd >= 0) fds[nfds++] = {pidfd, POLLIN, 0};
    if (output_open) fds[nfds++] = {output_pipe[0], POLLIN, 0};
    int wait_ms = 5;
    if (pidfd >= 0) {
      wait_ms = 50;
      if (spec.timeout.count() > 0) {
        auto deadline = term_sent ? term_time + kTermGrace : start + spec.timeout;
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                        deadline - now).count() + 1;
        if (left < wait_ms) wait_ms = static_cast<int>(left < 1 ? 1 : left);
      }
    }
    if (nfds > 0) {
      poll(fds, static_cast<nfds_t>(nfds), wait_ms);
    } else {
      usleep(static_cast<useconds_t>(wait_ms) * 1000);
    }
    if (output_open) DrainPipe(output_pipe[0], result.output, output_open);
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) reaped = true;
  }
  // Reap any stragglers left in the group.
  kill(-pid, SIGKILL);
  if (output_open) {
    // Drain what remains; writers in the group are gone after SIGKILL.
    fcntl(output_pipe[0], F_SETFL, 0);
    char buffer[4096];
    ssize_t n;
    while ((n = read(output_pipe[0], buffer, sizeof(buffer))) > 0) {
      if (result.output.size() < kMaxCapturedOutput) {
        result.output.append(buffer, static_cast<std::size_t>(n));
      }
    }
  }
  if (spec.capture_output) close(output_pipe[0]);
  if (pidfd >= 0) close(pidfd);

  result.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  if (!result.spawned) {
    result.exited = true;
    result.exit_code = 127;
    result.output += std::string("exec failed: ") + std::strerror(exec_errno);
    return result;
  }
  if (WIFEXITED(status)) {
    result.exited = true;
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.signal = WTERMSIG(status);
  }
  return result;
}

ProcessResult RunShell(const std::string& command,
                       const std::filesystem::path& cwd,
                       std::chrono::milliseconds timeout,
                       const std::map<std::string, std::string>& env,
                       bool capture_output) {
  ProcessSpec spec;
  spec.argv = {"/bin/sh", "-c", command};
  spec.cwd = cwd;
  spec.env = env;
  spec.timeout = timeout;
  spec.capture_output = capture_output;
  return RunProcess(spec);
}

std::string DescribeProcessResult(const ProcessResult& result) {
  std::ostringstream out;
  if (!result.spawned) {
    out << "not spawned";
  } else if (result.timed_out) {
    out << "timed out";
  } else if (result.signaled) {
    out << "killed by signal " << result.signal << " (" << strsignal(result.signal)
        << ")";
  } else {
    out << "exit code " << result.exit_code;
  }
  return out.str();
}

}  // namespace mutafuzz
