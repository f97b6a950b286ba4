#include "cwm/model/vocab.hpp"

#include <algorithm>
#include <set>

#include "cwm/util/text.hpp"
#include "cwm/world/rules.hpp"

namespace cwm::model {

namespace {

void add_text(std::set<std::string>& words, const std::string& text) {
  for (const std::string& token : util::split_tokens(text)) {
    words.insert(token);
  }
}

}  // namespace

int Vocabulary::id_of(const std::string& token) const {
  const auto it = index.find(token);
  return it == index.end() ? 0 : it->second;
}

Vocabulary vocabulary_from_tokens(std::vector<std::string> tokens) {
  Vocabulary vocab;
  vocab.tokens = std::move(tokens);
  for (std::size_t i = 0; i < vocab.tokens.size(); ++i) {
    vocab.index.emplace(vocab.tokens[i], static_cast<int>(i));
  }
  return vocab;
}

Vocabulary build_vocabulary() {
  std::set<std::string> words;

  for (const auto& rule : world::verb_table()) {
    for (const std::string& tok : util::split_whitespace(rule.pattern)) {
      if (tok != "<x>" && tok != "<y>") words.insert(tok);
    }
  }
  for (const auto& s : world::substance_table()) add_text(words, s.name);
  for (const auto& [a, b] : world::antonym_table()) {
    words.insert(a);
    words.insert(b);
  }
  for (const auto& pool : world::synonym_pools()) {
    for (const auto& name : pool.names) add_text(words, name);
  }
  for (const auto& stage : world::growth_stage_names()) {
    add_text(words, stage);
  }

  // Rooms, fixed furniture, and the rendering template.
  for (const char* text :
       {"kitchen", "greenhouse", "workshop", "stove", "freezer", "counter",
        "planter", "shelf", "crate", "workbench", "thermometer",
        "you are in the . you see : nothing . in the : your inventory is "
        "empty . contains a some c on off open closed containing reads "
        "stage unplanted running stopped ajar shut latched unlatched"}) {
    add_text(words, text);
  }

  // Every temperature or reading the physics can produce renders as a
  // bare magnitude token after tokenization.
  for (int t = 0; t <= world::kHeatCeiling; ++t) {
    words.insert(std::to_string(t));
  }

  std::vector<std::string> tokens(words.begin(), words.end());
  std::sort(tokens.begin(), tokens.end());
  tokens.insert(tokens.begin(), kUnknownToken);
  return vocabulary_from_tokens(std::move(tokens));
}

std::vector<int> encode(const Vocabulary& vocab, const std::string& text) {
  std::vector<int> ids;
  for (const std::string& token : util::split_tokens(text)) {
    ids.push_back(vocab.id_of(token));
  }
  return ids;
}

}  // namespace cwm::model
