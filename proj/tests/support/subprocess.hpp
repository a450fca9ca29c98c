// Minimal subprocess runner for exercising the CLI binary from tests.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <unistd.h>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testsupport {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Runs a shell command, capturing stdout/stderr and the exit code.
inline RunResult run(const std::string& command,
                     const std::filesystem::path& workdir) {
  namespace fs = std::filesystem;
  const fs::path out_file = workdir / "stdout.txt";
  const fs::path err_file = workdir / "stderr.txt";
  const std::string full = "cd '" + workdir.string() + "' && " + command +
                           " > '" + out_file.string() + "' 2> '" +
                           err_file.string() + "'";
  const int status = std::system(full.c_str());
  RunResult r;
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

/// Fresh scratch directory under the system temp root.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("magtrack_" + tag + "_" + std::to_string(::getpid()) +
                        "_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace testsupport
