#pragma once

#include <string>

namespace thinhom {

inline constexpr const char* kVersion = "0.1.0";

inline std::string version_string() {
#ifdef THINHOM_GIT_REVISION
  return std::string(kVersion) + "+" + THINHOM_GIT_REVISION;
#else
  return std::string(kVersion) + "+unknown";
#endif
}

}  // namespace thinhom
