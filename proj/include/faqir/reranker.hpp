#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faqir/bm25.hpp"
#include "faqir/embedding.hpp"

namespace faqir {

struct TwoStageConfig {
  std::size_t first_stage_k = 50;
  std::size_t final_k = 10;
  Bm25Params bm25;
  bool normalize_tokens = true;  // cosine token similarity; raw dot when off

  // UsageError unless 1 <= final_k <= first_stage_k and bm25 is valid.
  void validate() const;
};

// Late-interaction score: for each query row, the best dot product with any
// doc row, summed. With `normalize` every row is scaled to unit length first
// (DataError on a zero row). DataError on dimension mismatch or empty input.
double maxsim_score(MatrixView query, MatrixView doc, bool normalize = true);

// Row-normalized copy of a matrix, stored row-major.
std::vector<double> normalized_rows(MatrixView m);

// Re-scores `candidates` by MaxSim against the query's token matrix and keeps
// the best config.final_k, in RankedList order.
RankedList rerank(std::string_view query_id, const RankedList& candidates,
                  const TokenMatrixStore& queries, const TokenMatrixStore& docs,
                  const TwoStageConfig& config);

// BM25+ top first_stage_k, then rerank to final_k. Empty when the first
// stage finds nothing.
RankedList two_stage_retrieve(std::string_view query_text, std::string_view query_id,
                              const Bm25Index& index, const TokenMatrixStore& queries,
                              const TokenMatrixStore& docs, const TwoStageConfig& config);

struct Triplet {
  std::string query_id;
  std::string positive_id;
  std::string negative_id;

  bool operator==(const Triplet&) const = default;
};

// sq_l2(q, negative) - sq_l2(q, positive); positive when the triplet holds.
double triplet_margin(const Triplet& triplet, const SentenceVectorStore& queries,
                      const SentenceVectorStore& answers);

struct TripletSummary {
  std::size_t total = 0;
  std::size_t satisfied = 0;  // margin > 0
  double mean_margin = 0.0;

  double fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(satisfied) / static_cast<double>(total);
  }
};

TripletSummary evaluate_triplets(std::span<const Triplet> triplets,
                                 const SentenceVectorStore& queries,
                                 const SentenceVectorStore& answers);

// One triplet per gold query (in key order) with the negative drawn uniformly
// from `answer_ids` minus the gold answer, seeded by mix_seed(seed, query id).
std::vector<Triplet> sample_triplets(const std::map<std::string, std::string>& gold,
                                     std::span<const std::string> answer_ids, std::uint64_t seed);

std::vector<Triplet> load_triplets(const std::filesystem::path& path);
void write_triplets(const std::filesystem::path& path, std::span<const Triplet> triplets);

// Run files: JSON Lines {"query_id": str, "ranking": [ids], "scores": [nums]}.
std::vector<RankedList> load_run(const std::filesystem::path& path);
void write_run(const std::filesystem::path& path, std::span<const RankedList> run);

}  // namespace faqir
