#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sitehunt/corpus.hpp"
#include "sitehunt/io.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return SITEHUNT_TEST_DATA; }
inline std::filesystem::path golden_dir() { return data_dir() / "golden"; }

// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sitehunt-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
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

inline sitehunt::Corpus corpus_from(const std::string& jsonl) {
  std::istringstream in(jsonl);
  return sitehunt::read_posts(in);
}

inline sitehunt::Corpus golden_corpus() { return sitehunt::load_posts(golden_dir() / "posts.jsonl"); }
inline sitehunt::LabelSet golden_labels() { return sitehunt::load_labels(golden_dir() / "labels.csv"); }
inline sitehunt::Denylist golden_denylist() { return sitehunt::load_denylist(golden_dir() / "denylist.txt"); }

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr
};

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace testing
