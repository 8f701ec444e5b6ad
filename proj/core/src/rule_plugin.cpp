#include "marginsel/rule_plugin.hpp"

#include <fcntl.h>
#include <pthread.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <ctime>
#include <stdexcept>

#include <nlohmann/json.hpp>

extern char** environ;

namespace marginsel {

namespace {

struct Fd {
  int fd = -1;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("external rule: " + what + ": " + std::strerror(errno));
}

// Writes everything, reporting a closed pipe as a short write instead of
// letting SIGPIPE kill the process.
void write_all(int fd, const std::string& text) {
  sigset_t block, old;
  sigemptyset(&block);
  sigaddset(&block, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &block, &old);
  std::size_t done = 0;
  bool broken = false;
  while (done < text.size()) {
    const ssize_t w = ::write(fd, text.data() + done, text.size() - done);
    if (w < 0) {
      if (errno == EINTR) continue;
      broken = errno == EPIPE;
      break;
    }
    done += static_cast<std::size_t>(w);
  }
  if (broken) {
    // Drop the pending SIGPIPE raised by this thread.
    const timespec zero{0, 0};
    sigtimedwait(&block, nullptr, &zero);
  }
  pthread_sigmask(SIG_SETMASK, &old, nullptr);
}

} // namespace

ExternalRule::ExternalRule(std::string command, Output output) : command_(std::move(command)), output_(output) {
  if (command_.empty()) throw std::invalid_argument("ExternalRule: empty command");
}

std::string sample_to_json_lines(const Sample& sample) {
  std::string out;
  for (auto atom : sample.draws()) {
    const Atom a = atom_at(atom);
    out += nlohmann::json{{"x", a.x}, {"y", a.y}}.dump();
    out += '\n';
  }
  return out;
}

double ExternalRule::run(const Sample& sample) const {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) fail("pipe");
  Fd in_read{in_pipe[0]}, in_write{in_pipe[1]};
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) fail("pipe");
  Fd out_read{out_pipe[0]}, out_write{out_pipe[1]};

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_read.fd, STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_write.fd, STDOUT_FILENO);

  const char* argv[] = {"/bin/sh", "-c", command_.c_str(), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    errno = rc;
    fail("spawn");
  }
  in_read.reset();
  out_write.reset();

  write_all(in_write.fd, sample_to_json_lines(sample));
  in_write.reset();

  std::string text;
  char buf[4096];
  for (;;) {
    const ssize_t r = ::read(out_read.fd, buf, sizeof buf);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) break;
    text.append(buf, static_cast<std::size_t>(r));
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) fail("waitpid");
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw std::runtime_error("external rule: '" + command_ + "' exited abnormally");
  }

  double value = 0.0;
  std::size_t used = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("external rule: cannot parse output '" + text + "'");
  }
  if (text.find_first_not_of(" \t\r\n", used) != std::string::npos) {
    throw std::runtime_error("external rule: trailing output '" + text + "'");
  }
  if (output_ == Output::probability && !(value >= 0.0 && value <= 1.0)) {
    throw std::runtime_error("external rule: probability outside [0, 1]");
  }
  if (output_ == Output::model_index && (value < 0.0 || value != std::floor(value))) {
    throw std::runtime_error("external rule: model index must be a nonnegative integer");
  }
  return value;
}

} // namespace marginsel
