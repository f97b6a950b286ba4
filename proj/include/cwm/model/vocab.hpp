#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace cwm::model {

inline constexpr const char* kUnknownToken = "<unk>";

/// Closed token inventory derived purely from the world rule tables, so
/// any two builds agree on it byte for byte. Index 0 is the unknown
/// token; the rest are sorted.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;

  int id_of(const std::string& token) const;
  std::size_t size() const { return tokens.size(); }

  bool operator==(const Vocabulary& other) const {
    return tokens == other.tokens;
  }
};

Vocabulary build_vocabulary();
Vocabulary vocabulary_from_tokens(std::vector<std::string> tokens);

/// Token ids for a text under the shared tokenizer; unknown tokens map
/// to id 0.
std::vector<int> encode(const Vocabulary& vocab, const std::string& text);

}  // namespace cwm::model
