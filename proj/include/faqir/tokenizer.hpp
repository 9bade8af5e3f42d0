#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace faqir {

struct TokenizerConfig {
  bool lowercase = true;
  bool strip_diacritics = false;
  std::size_t min_token_length = 1;  // in code points
  // Matched against tokens after case and diacritic normalization; entries
  // are normalized the same way before matching.
  std::set<std::string> stopwords;

  bool operator==(const TokenizerConfig&) const = default;
};

// Splits on any character that is not a letter, digit or combining mark.
// Normalization order per token: lowercase, diacritic folding, length and
// stopword filtering. No stemming.
class Tokenizer {
 public:
  explicit Tokenizer(TokenizerConfig config);

  std::vector<std::string> tokenize(std::string_view text) const;
  // Applies case and diacritic normalization to a single word.
  std::string normalize(std::string_view word) const;
  bool is_stopword(const std::string& normalized) const;

  const TokenizerConfig& config() const { return config_; }

 private:
  TokenizerConfig config_;
  std::set<std::string> normalized_stopwords_;
};

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

// One token per line; '#' starts a comment line; blank lines ignored.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace faqir
