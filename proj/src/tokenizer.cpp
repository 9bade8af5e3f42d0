#include "faqir/tokenizer.hpp"

#include <fstream>

#include "faqir/error.hpp"
#include "faqir/text.hpp"

namespace faqir {

Tokenizer::Tokenizer(TokenizerConfig config) : config_(std::move(config)) {
  if (config_.min_token_length < 1) throw UsageError("min_token_length must be >= 1");
  for (const auto& word : config_.stopwords) normalized_stopwords_.insert(normalize(word));
}

std::string Tokenizer::normalize(std::string_view word) const {
  std::string out;
  out.reserve(word.size());
  for (std::size_t pos = 0; pos < word.size();) {
    char32_t cp = text::decode_next(word, pos);
    if (config_.lowercase) cp = text::to_lower(cp);
    if (config_.strip_diacritics) cp = text::strip_diacritic(cp);
    if (cp != 0) text::append_utf8(out, cp);
  }
  return out;
}

bool Tokenizer::is_stopword(const std::string& normalized) const {
  return normalized_stopwords_.contains(normalized);
}

std::vector<std::string> Tokenizer::tokenize(std::string_view input) const {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t length = 0;

  const auto flush = [&] {
    if (length >= config_.min_token_length && !is_stopword(current)) {
      tokens.push_back(std::move(current));
    }
    current.clear();
    length = 0;
  };

  for (std::size_t pos = 0; pos < input.size();) {
    char32_t cp = text::decode_next(input, pos);
    if (!text::is_word_char(cp)) {
      if (!current.empty()) flush();
      continue;
    }
    if (config_.lowercase) cp = text::to_lower(cp);
    if (config_.strip_diacritics) {
      cp = text::strip_diacritic(cp);
      if (cp == 0) continue;
    }
    text::append_utf8(current, cp);
    ++length;
  }
  if (!current.empty()) flush();
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  return Tokenizer(config).tokenize(text);
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto word = text::trim(line);
    if (word.empty() || word.front() == '#') continue;
    words.emplace(word);
  }
  return words;
}

}  // namespace faqir
