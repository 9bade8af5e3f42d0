#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "faqir/tokenizer.hpp"

namespace faqir {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
  double delta = 1.0;  // lower bound added to every matching term's tf part

  // Throws UsageError unless k1 > 0, b in [0, 1], delta >= 0, all finite.
  void validate() const;
};

struct Posting {
  std::uint32_t doc;  // ordinal into Bm25Index::doc_ids()
  std::uint32_t tf;
};

struct ScoredDoc {
  std::string id;
  double score;

  bool operator==(const ScoredDoc&) const = default;
};

// Entries are ordered by score descending, ties by ascending id.
struct RankedList {
  std::string query_id;
  std::vector<ScoredDoc> entries;

  std::vector<std::string> ids() const;

  bool operator==(const RankedList&) const = default;
};

// Sorts entries by the RankedList order.
void sort_ranked(std::vector<ScoredDoc>& entries);

struct Document {
  std::string id;
  std::string text;
};

// Immutable inverted index with BM25+ scoring. Document ordinals follow
// ascending id order, so ordinal order doubles as the tie-break order.
class Bm25Index {
 public:
  static constexpr int kFormatVersion = 1;

  static Bm25Index build(std::span<const Document> docs, const TokenizerConfig& config = {});
  static Bm25Index load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t doc_count() const { return doc_ids_.size(); }
  double avg_doc_length() const { return avg_doc_length_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<std::uint32_t>& doc_lengths() const { return doc_lengths_; }
  std::optional<std::uint32_t> find_doc(std::string_view id) const;
  const TokenizerConfig& tokenizer_config() const { return tokenizer_.config(); }
  const std::unordered_map<std::string, std::vector<Posting>>& postings() const {
    return postings_;
  }
  // Empty span for unseen terms.
  std::span<const Posting> postings(const std::string& term) const;

  std::size_t document_frequency(const std::string& term) const;
  // ln((N + 1) / df); 0 for unseen terms.
  double idf(const std::string& term) const;

  std::vector<std::string> analyze(std::string_view query) const;

  // BM25+ score of one document; throws DataError for unknown ids.
  double score(std::string_view query, std::string_view doc_id,
               const Bm25Params& params = {}) const;

  // Highest-scoring documents with a positive score, at most k of them.
  RankedList top_k(std::string_view query, std::size_t k, const Bm25Params& params = {},
                   std::string query_id = {}) const;

  // Dense per-ordinal scores for every document (0 for non-matching ones).
  std::vector<double> score_all(std::string_view query, const Bm25Params& params = {}) const;

 private:
  Bm25Index(Tokenizer tokenizer) : tokenizer_(std::move(tokenizer)) {}
  void finalize();

  Tokenizer tokenizer_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::unordered_map<std::string, std::uint32_t> doc_lookup_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avg_doc_length_ = 0.0;
};

// Selects the k best positive entries from dense per-ordinal scores.
std::vector<ScoredDoc> select_top_k(std::span<const double> scores,
                                    const std::vector<std::string>& ids, std::size_t k);

}  // namespace faqir
