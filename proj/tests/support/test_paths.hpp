#pragma once

#include <filesystem>
#include <string>

#ifndef UQSEG_TEST_SCRATCH
#define UQSEG_TEST_SCRATCH "."
#endif

/// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path test_scratch_dir(const std::string &name) {
  const auto dir = std::filesystem::path(UQSEG_TEST_SCRATCH) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
