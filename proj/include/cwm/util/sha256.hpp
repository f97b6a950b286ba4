#pragma once

#include <cstdint>
#include <string>

namespace cwm::util {

/// SHA-256 of a byte string, returned as lowercase hex.
std::string sha256_hex(const std::string& bytes);

/// SHA-256 of a file's bytes. Throws std::runtime_error if unreadable.
std::string sha256_file_hex(const std::string& path);

}  // namespace cwm::util
