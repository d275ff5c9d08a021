#pragma once

// Shared helpers for the test binaries: fixture paths and a tiny
// process-spawn wrapper for driving the CLI.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

#include <sys/wait.h>

#include "sensebench/detail/io.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return SENSEBENCH_DATA_DIR; }
inline std::filesystem::path golden_dir() { return SENSEBENCH_GOLDEN_DIR; }
inline std::filesystem::path testdata_dir() { return SENSEBENCH_TESTDATA_DIR; }
inline std::filesystem::path resource_dir() { return SENSEBENCH_RESOURCE_DIR; }
inline std::filesystem::path templates_dir() { return resource_dir() / "templates"; }

/// Golden files carry one editor-added trailing newline; generated text
/// does not.
inline std::string read_golden(const std::string& name) {
  std::string text = sensebench::detail::read_file(golden_dir() / name);
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

/// A scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sensebench-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

/// Runs a shell command, capturing combined output and the exit status.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed for: " + command);
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::string shell_quote(const std::string& arg) {
  std::string out = "'";
  for (const char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

}  // namespace testsupport
