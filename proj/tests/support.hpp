#pragma once

#include <filesystem>
#include <random>
#include <string>

#ifndef NORA_SOURCE_DIR
#define NORA_SOURCE_DIR "."
#endif

namespace nora::fixtures {

inline std::filesystem::path source_dir() { return NORA_SOURCE_DIR; }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::random_device rd;
  auto dir = std::filesystem::temp_directory_path() /
             ("nora-" + name + "-" + std::to_string(rd()) + std::to_string(rd()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct ScratchDir {
  explicit ScratchDir(const std::string& name) : path(scratch_dir(name)) {}
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path path;
};

}  // namespace nora::fixtures
