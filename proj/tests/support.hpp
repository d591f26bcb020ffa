#pragma once

#include "oracles.hpp"

#include <doctest.h>

namespace testing {

// Compares against tests/golden/<name>; MAPCOLOR_UPDATE_GOLDEN=1 rewrites it.
inline void check_golden(const std::string& name, const std::string& actual) {
  const auto path = tests_dir() / "golden" / name;
  const char* update = std::getenv("MAPCOLOR_UPDATE_GOLDEN");
  if (update != nullptr && std::string(update) == "1") {
    write_file(path, actual);
    return;
  }
  REQUIRE_MESSAGE(fs::exists(path), "missing golden file " << path.string());
  CHECK_MESSAGE(read_file(path) == actual, "golden mismatch: " << name);
}

// Runs fn and returns the error code it throws; fails when it returns.
template <typename Fn>
mapcolor::Errc error_of(Fn&& fn) {
  try {
    fn();
  } catch (const mapcolor::Error& e) {
    return e.code();
  }
  FAIL("expected a mapcolor::Error");
  return mapcolor::Errc::Internal;
}

}  // namespace testing
