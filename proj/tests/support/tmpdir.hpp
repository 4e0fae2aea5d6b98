#pragma once

#include <filesystem>
#include <string>

namespace testsupport {

// Fresh scratch directory under the system temp root; wiped on entry so
// reruns never see stale files.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "caflow_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
