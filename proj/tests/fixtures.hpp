#pragma once

#include <filesystem>
#include <string>

namespace sunada::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SUNADA_FIXTURE_DIR) / name;
}

}  // namespace sunada::test
