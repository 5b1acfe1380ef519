#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "hoarefix/lang.hpp"

namespace hoarefix::testing {

inline constexpr const char* kAbsBuggy =
    "method abs(x: int) returns (res: int)\n"
    "  ensures x >= 0 ==> res == x\n"
    "  ensures x < 0 ==> res == -x\n"
    "{\n"
    "  if (x >= 0) {\n"
    "    return x;\n"
    "  } else {\n"
    "    return x*1;\n"
    "  }\n"
    "}\n";

inline constexpr int kAbsBuggyLine = 8;

inline std::string abs_fixed() {
  std::string s = kAbsBuggy;
  s.replace(s.find("return x*1;"), 11, "return -x;");
  return s;
}

inline std::filesystem::path corpus_dir() { return HOAREFIX_CORPUS_DIR; }
inline std::filesystem::path testdata_dir() { return HOAREFIX_TESTDATA_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

inline bool z3_available() {
  const char* path = std::getenv("PATH");
  std::stringstream ss(path ? path : "");
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (!dir.empty() && ::access((std::filesystem::path(dir) / "z3").c_str(), X_OK) == 0) return true;
  }
  return false;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("hoarefix-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace hoarefix::testing
