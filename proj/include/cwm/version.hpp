#pragma once

namespace cwm {

inline constexpr const char* kToolVersion = "0.1.0";

// Bumped whenever any on-disk format changes shape.
inline constexpr int kSchemaVersion = 1;

}  // namespace cwm
