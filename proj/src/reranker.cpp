#include "faqir/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "faqir/error.hpp"
#include "faqir/jsonl.hpp"
#include "faqir/kernels.hpp"
#include "faqir/random.hpp"

namespace faqir {

void TwoStageConfig::validate() const {
  if (first_stage_k < 1) throw UsageError("first_stage_k must be >= 1");
  if (final_k < 1) throw UsageError("final_k must be >= 1");
  if (final_k > first_stage_k) throw UsageError("final_k must not exceed first_stage_k");
  bm25.validate();
}

std::vector<double> normalized_rows(MatrixView m) {
  std::vector<double> out(m.flat().begin(), m.flat().end());
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double n = norm(m.row(r));
    if (n == 0.0) throw DataError("zero-norm token row " + std::to_string(r));
    for (std::size_t c = 0; c < m.cols; ++c) out[r * m.cols + c] /= n;
  }
  return out;
}

double maxsim_score(MatrixView query, MatrixView doc, bool normalize) {
  if (query.rows == 0 || doc.rows == 0) throw DataError("maxsim: empty token matrix");
  if (query.cols != doc.cols) throw DataError("maxsim: token dimension mismatch");
  if (!normalize) return kernels::maxsim(query, doc);
  const auto q = normalized_rows(query);
  const auto d = normalized_rows(doc);
  return kernels::maxsim({q.data(), query.rows, query.cols}, {d.data(), doc.rows, doc.cols});
}

RankedList rerank(std::string_view query_id, const RankedList& candidates,
                  const TokenMatrixStore& queries, const TokenMatrixStore& docs,
                  const TwoStageConfig& config) {
  config.validate();
  RankedList out{std::string(query_id), {}};
  if (candidates.entries.empty()) return out;

  const MatrixView query = queries.matrix(query_id);
  if (query.cols != docs.dimension()) {
    throw DataError("query and document token dimensions differ");
  }
  std::vector<double> query_rows;
  MatrixView q = query;
  if (config.normalize_tokens) {
    query_rows = normalized_rows(query);
    q.data = query_rows.data();
  }

  const std::size_t n = candidates.entries.size();
  std::vector<std::vector<double>> doc_rows(config.normalize_tokens ? n : 0);
  std::vector<MatrixView> views(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = candidates.entries[i].id;
    views[i] = docs.matrix(id);
    if (config.normalize_tokens) {
      try {
        doc_rows[i] = normalized_rows(views[i]);
      } catch (const DataError& e) {
        throw DataError("document '" + id + "': " + e.what());
      }
      views[i].data = doc_rows[i].data();
    }
  }

  std::vector<double> scores(n);
  kernels::parallel::maxsim_batch(q, views, scores);

  out.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.entries.push_back({candidates.entries[i].id, scores[i]});
  sort_ranked(out.entries);
  if (out.entries.size() > config.final_k) out.entries.resize(config.final_k);
  return out;
}

RankedList two_stage_retrieve(std::string_view query_text, std::string_view query_id,
                              const Bm25Index& index, const TokenMatrixStore& queries,
                              const TokenMatrixStore& docs, const TwoStageConfig& config) {
  config.validate();
  const auto first = index.top_k(query_text, config.first_stage_k, config.bm25,
                                 std::string(query_id));
  if (first.entries.empty()) return {std::string(query_id), {}};
  return rerank(query_id, first, queries, docs, config);
}

double triplet_margin(const Triplet& triplet, const SentenceVectorStore& queries,
                      const SentenceVectorStore& answers) {
  const auto q = queries.vector(triplet.query_id);
  return sq_l2(q, answers.vector(triplet.negative_id)) -
         sq_l2(q, answers.vector(triplet.positive_id));
}

TripletSummary evaluate_triplets(std::span<const Triplet> triplets,
                                 const SentenceVectorStore& queries,
                                 const SentenceVectorStore& answers) {
  TripletSummary s;
  double total_margin = 0.0;
  for (const auto& t : triplets) {
    const double m = triplet_margin(t, queries, answers);
    total_margin += m;
    ++s.total;
    if (m > 0.0) ++s.satisfied;
  }
  if (s.total > 0) s.mean_margin = total_margin / static_cast<double>(s.total);
  return s;
}

std::vector<Triplet> sample_triplets(const std::map<std::string, std::string>& gold,
                                     std::span<const std::string> answer_ids, std::uint64_t seed) {
  std::vector<Triplet> out;
  out.reserve(gold.size());
  for (const auto& [query, positive] : gold) {
    std::vector<const std::string*> negatives;
    for (const auto& a : answer_ids) {
      if (a != positive) negatives.push_back(&a);
    }
    if (negatives.empty()) {
      throw DataError("no negative answer available for query '" + query + "'");
    }
    Rng rng(mix_seed(seed, query));
    out.push_back({query, positive, *negatives[uniform_index(rng, negatives.size())]});
  }
  return out;
}

std::vector<Triplet> load_triplets(const std::filesystem::path& path) {
  std::vector<Triplet> out;
  jsonl::for_each(path, [&](const jsonl::Json& obj, std::size_t line) {
    Triplet t{jsonl::require_string(obj, "query_id", line),
              jsonl::require_string(obj, "positive_id", line),
              jsonl::require_string(obj, "negative_id", line)};
    if (t.positive_id == t.negative_id) {
      throw DataError("line " + std::to_string(line) + ": positive and negative ids are equal");
    }
    out.push_back(std::move(t));
  });
  return out;
}

void write_triplets(const std::filesystem::path& path, std::span<const Triplet> triplets) {
  auto out = jsonl::open_output(path);
  for (const auto& t : triplets) {
    jsonl::write_line(out, {{"query_id", t.query_id},
                            {"positive_id", t.positive_id},
                            {"negative_id", t.negative_id}});
  }
  if (!out) throw DataError("failed writing " + path.string());
}

std::vector<RankedList> load_run(const std::filesystem::path& path) {
  std::vector<RankedList> run;
  jsonl::for_each(path, [&](const jsonl::Json& obj, std::size_t line) {
    RankedList list{jsonl::require_string(obj, "query_id", line), {}};
    const auto& ranking = obj.at("ranking");
    const auto& scores = obj.at("scores");
    if (!ranking.is_array() || !scores.is_array() || ranking.size() != scores.size()) {
      throw DataError("line " + std::to_string(line) +
                      ": 'ranking' and 'scores' must be arrays of equal length");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      auto id = ranking[i].get<std::string>();
      if (!seen.insert(id).second) {
        throw DataError("line " + std::to_string(line) + ": duplicate id '" + id + "' in ranking");
      }
      list.entries.push_back({std::move(id), jsonl::require_finite(scores[i], "scores", line)});
    }
    run.push_back(std::move(list));
  });
  return run;
}

void write_run(const std::filesystem::path& path, std::span<const RankedList> run) {
  auto out = jsonl::open_output(path);
  for (const auto& list : run) {
    std::vector<double> scores;
    scores.reserve(list.entries.size());
    for (const auto& e : list.entries) scores.push_back(e.score);
    jsonl::write_line(out, {{"query_id", list.query_id}, {"ranking", list.ids()}, {"scores", scores}});
  }
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace faqir
