#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "faqir/tokenizer.hpp"

namespace faqir {

struct FaqRecord {
  std::string id;
  std::string question;
  std::string category;
  std::string answer;

  bool operator==(const FaqRecord&) const = default;
};

inline constexpr const char* kOutOfDomainCategory = "OOD";

// Ordered, id-unique collection of FAQ records.
class Corpus {
 public:
  Corpus() = default;
  // Validates every record and id uniqueness; throws DataError.
  explicit Corpus(std::vector<FaqRecord> records);

  const std::vector<FaqRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const FaqRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<FaqRecord> records_;
};

enum class CorpusFormat { kJsonl, kCsv };

// Maps canonical fields to CSV header names. `id` is optional; when empty or
// absent from the header, ids are synthesized.
struct ColumnMap {
  std::string id = "id";
  std::string question = "question";
  std::string category = "category";
  std::string answer = "answer";
};

struct LoadOptions {
  CorpusFormat format = CorpusFormat::kJsonl;
  ColumnMap columns;
  char delimiter = ',';
};

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

// Zero-padded six-digit ordinal used when the source has no id column.
std::string synthesized_id(std::size_t row);

enum class WordCountMode {
  kWhitespace,  // trimmed, whitespace-delimited words
  kTokenizer,   // words as produced by the search tokenizer
};

struct ColumnStats {
  double avg_words = 0.0;
  std::size_t unique_values = 0;
};

struct CorpusStats {
  std::size_t record_count = 0;
  ColumnStats question;
  ColumnStats category;
  ColumnStats answer;
  std::map<std::string, std::size_t> category_histogram;
  // Largest category counts, descending, over the whole histogram.
  std::vector<std::size_t> top_counts;
  // Same, excluding the out-of-domain category.
  std::vector<std::size_t> top_counts_in_domain;
  std::size_t ood_count = 0;
  std::size_t categories_in_domain = 0;
  std::size_t short_questions = 0;  // fewer than 5 words
};

struct StatsOptions {
  std::size_t top_k = 3;
  WordCountMode word_mode = WordCountMode::kWhitespace;
  TokenizerConfig tokenizer;
};

CorpusStats compute_stats(const Corpus& corpus, const StatsOptions& options = {});

struct Split {
  Corpus train;
  Corpus test;
};

// Fisher-Yates permutation driven by std::mt19937_64(seed); the first
// ceil(n * train_fraction) permuted records form the training set. Both
// partitions keep the corpus' relative record order.
Split split_holdout(const Corpus& corpus, double train_fraction, std::uint64_t seed);
std::size_t train_size(std::size_t n, double train_fraction);

Corpus filter_small_classes(const Corpus& corpus, std::size_t min_count);

}  // namespace faqir
