#include "projseg/external_scorer.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <filesystem>
#include <thread>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "projseg/error.hpp"

namespace projseg {

void ExternalScorerSpec::validate() const {
  if (command.find_first_not_of(" \t") == std::string::npos) throw ConfigError("scorer: command is empty");
  if (!(timeout_seconds > 0.0)) throw ConfigError("scorer: timeout must be > 0");
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (const char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  q += '\'';
  return q;
}

}  // namespace

std::string substitute_placeholders(const std::string& command_template, const ScorerInputs& inputs) {
  const std::pair<const char*, const std::string*> keys[] = {
      {"{rgb}", &inputs.rgb}, {"{jet}", &inputs.jet}, {"{normal}", &inputs.normal}, {"{out}", &inputs.out}};
  std::string result;
  std::size_t pos = 0;
  while (pos < command_template.size()) {
    bool matched = false;
    for (const auto& [key, value] : keys) {
      const std::size_t len = std::strlen(key);
      if (command_template.compare(pos, len, key) == 0) {
        result += shell_quote(*value);
        pos += len;
        matched = true;
        break;
      }
    }
    if (!matched) result += command_template[pos++];
  }
  return result;
}

ScoreMap run_external_scorer(const ExternalScorerSpec& spec, const ScorerInputs& inputs, int height, int width,
                             const std::string& view_name) {
  spec.validate();
  const std::string command = substitute_placeholders(spec.command, inputs);
  std::error_code ec;
  std::filesystem::remove(inputs.out, ec);

  const pid_t pid = ::fork();
  if (pid < 0) throw ScorerError(view_name + ": fork failed: " + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    if (!spec.working_dir.empty() && ::chdir(spec.working_dir.c_str()) != 0) ::_exit(126);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);

  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration<double>(spec.timeout_seconds);
  int status = 0;
  while (true) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw ScorerError(view_name + ": waitpid failed: " + std::strerror(errno));
    if (clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      throw ScorerTimeoutError(view_name + ": scorer timed out after " + std::to_string(spec.timeout_seconds) + " s");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    throw ScorerExitError(view_name + ": scorer exited with status " + std::to_string(code), code);
  }

  ScoreMap scores;
  try {
    scores = load_scores(inputs.out);
  } catch (const DataError& e) {
    throw ScorerOutputError(view_name + ": malformed scorer output: " + e.what());
  }
  if (scores.height != height || scores.width != width || scores.channels != kScoreChannels) {
    throw ScoreDimensionError(view_name + ": scorer produced " + std::to_string(scores.height) + "x" +
                              std::to_string(scores.width) + "x" + std::to_string(scores.channels) +
                              ", expected " + std::to_string(height) + "x" + std::to_string(width) + "x" +
                              std::to_string(kScoreChannels));
  }
  return scores;
}

}  // namespace projseg
