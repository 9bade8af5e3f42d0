#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "faqir/bm25.hpp"
#include "faqir/corpus.hpp"
#include "faqir/embedding.hpp"
#include "faqir/reranker.hpp"

namespace faqir {

// Query id -> the single relevant target id (or label).
using GoldMapping = std::map<std::string, std::string>;

// JSON Lines {"query_id": str, "target_id": str}; DataError on duplicates.
GoldMapping load_gold(const std::filesystem::path& path);
void write_gold(const std::filesystem::path& path, const GoldMapping& gold);

enum class GoldTarget { kId, kQuestion, kCategory, kAnswer };
// Record id -> the chosen field of the same record.
GoldMapping gold_from_corpus(const Corpus& corpus, GoldTarget target);

// 1/r when the gold id is at 1-based position r <= k, else 0.
double reciprocal_rank(const RankedList& ranking, const std::string& gold_id, std::size_t k);

// Mean reciprocal rank at k. DataError when a query is missing from gold or
// there are no rankings; UsageError when k < 1.
double mrr_at_k(std::span<const RankedList> rankings, const GoldMapping& gold, std::size_t k);

enum class F1Average { kMacro, kMicro, kWeighted };

F1Average parse_f1_average(const std::string& name);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // occurrences in gold
};

struct F1Breakdown {
  std::map<std::string, ClassScores> per_class;  // classes in gold or predictions
  double macro = 0.0;     // unweighted mean over classes present in gold
  double micro = 0.0;     // global counts
  double weighted = 0.0;  // gold-support-weighted mean
};

// Per-class precision/recall/F1 with 0/0 taken as 0. DataError when the id
// sets differ.
F1Breakdown f1_breakdown(const std::map<std::string, std::string>& predictions,
                         const std::map<std::string, std::string>& gold);
double f1_report(const std::map<std::string, std::string>& predictions,
                 const std::map<std::string, std::string>& gold,
                 F1Average average = F1Average::kMacro);

struct EvalReport {
  std::string system;
  std::string dataset;
  std::string target;
  std::string metric;
  std::optional<std::size_t> k;
  double value = 0.0;  // in [0, 1]
};

struct ReportLabels {
  std::string system;
  std::string dataset;
  std::string target;
};

// Ranks every target by cosine to each gold query (ties by ascending id) and
// reports MRR@k for each k.
std::vector<EvalReport> semantic_search_eval(const SentenceVectorStore& query_vectors,
                                             const SentenceVectorStore& target_vectors,
                                             const GoldMapping& gold,
                                             std::span<const std::size_t> k_values,
                                             const ReportLabels& labels = {});

struct QueryText {
  std::string id;
  std::string text;
};

// Accepts corpus records {"id", "question"}, augmented pairs
// {"original_id", "text"} (id = original id) or {"query_id", "text"}.
// DataError on duplicate query ids.
std::vector<QueryText> load_queries(const std::filesystem::path& path);

struct Gain {
  std::size_t k = 0;
  double baseline = 0.0;
  double reranked = 0.0;
  // 100 * (reranked - baseline) / baseline; unset when baseline is 0.
  std::optional<double> percent;
};

struct FaqEvalResult {
  std::vector<EvalReport> rows;  // one per (system, k)
  std::vector<Gain> gains;       // one per k
  std::vector<RankedList> bm25_run;
  std::vector<RankedList> two_stage_run;
};

inline constexpr const char* kBm25System = "bm25+";
inline constexpr const char* kTwoStageSystem = "two_stage";

// Runs BM25+ alone and BM25+ followed by MaxSim re-ranking for every query.
FaqEvalResult faq_retrieval_eval(std::span<const QueryText> queries, const Bm25Index& index,
                                 const TokenMatrixStore& query_matrices,
                                 const TokenMatrixStore& doc_matrices, const GoldMapping& gold,
                                 const TwoStageConfig& config,
                                 std::span<const std::size_t> k_values,
                                 const ReportLabels& labels = {});

// CSV columns system,dataset,target,metric,k,value. Gains become rows with
// metric gain_pct, system two_stage, and value NA when undefined.
std::string reports_to_csv(std::span<const EvalReport> rows, std::span<const Gain> gains = {},
                           const ReportLabels& gain_labels = {});
std::string reports_to_json(std::span<const EvalReport> rows, std::span<const Gain> gains = {});

}  // namespace faqir
