#pragma once

#include <string>
#include <vector>

namespace cwm::util {

/// Lowercases and splits on runs of non-alphanumeric characters.
/// Canonical action surfaces and rendered states round-trip through this
/// (joining the tokens with single spaces reproduces the text modulo
/// punctuation).
std::vector<std::string> split_tokens(const std::string& text);

/// Splits on runs of whitespace without touching other characters.
std::vector<std::string> split_whitespace(const std::string& text);

/// Splits on a single delimiter character; empty fields are dropped.
std::vector<std::string> split_on(const std::string& text, char delim);

std::string to_lower(const std::string& text);

std::string join(const std::vector<std::string>& tokens,
                 const std::string& sep);

}  // namespace cwm::util
