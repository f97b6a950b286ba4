#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cwm::util {

std::string read_file(const std::string& path);

/// Write-to-temp plus rename, so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& bytes);

bool file_exists(const std::string& path);

/// Parses one JSON object per line. Blank lines are skipped. A malformed
/// line throws std::runtime_error naming the 1-based line number.
std::vector<nlohmann::json> read_jsonl(const std::string& path);

/// Serializes one object per line, '\n' terminated, atomically.
void write_jsonl(const std::string& path,
                 const std::vector<nlohmann::json>& rows);

}  // namespace cwm::util
