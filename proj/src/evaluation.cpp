#include "faqir/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "faqir/error.hpp"
#include "faqir/jsonl.hpp"
#include "faqir/kernels.hpp"

namespace faqir {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_of(double p, double r) { return safe_div(2.0 * p * r, p + r); }

}  // namespace

GoldMapping load_gold(const std::filesystem::path& path) {
  GoldMapping gold;
  jsonl::for_each(path, [&](const jsonl::Json& obj, std::size_t line) {
    auto query = jsonl::require_string(obj, "query_id", line);
    auto target = jsonl::require_string(obj, "target_id", line);
    if (!gold.emplace(query, std::move(target)).second) {
      throw DataError("line " + std::to_string(line) + ": duplicate query id '" + query + "'");
    }
  });
  return gold;
}

void write_gold(const std::filesystem::path& path, const GoldMapping& gold) {
  auto out = jsonl::open_output(path);
  for (const auto& [q, t] : gold) jsonl::write_line(out, {{"query_id", q}, {"target_id", t}});
  if (!out) throw DataError("failed writing " + path.string());
}

GoldMapping gold_from_corpus(const Corpus& corpus, GoldTarget target) {
  GoldMapping gold;
  for (const auto& r : corpus) {
    switch (target) {
      case GoldTarget::kId: gold.emplace(r.id, r.id); break;
      case GoldTarget::kQuestion: gold.emplace(r.id, r.question); break;
      case GoldTarget::kCategory: gold.emplace(r.id, r.category); break;
      case GoldTarget::kAnswer: gold.emplace(r.id, r.answer); break;
    }
  }
  return gold;
}

double reciprocal_rank(const RankedList& ranking, const std::string& gold_id, std::size_t k) {
  const std::size_t limit = std::min(k, ranking.entries.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (ranking.entries[i].id == gold_id) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double mrr_at_k(std::span<const RankedList> rankings, const GoldMapping& gold, std::size_t k) {
  if (k < 1) throw UsageError("MRR cutoff k must be >= 1");
  if (rankings.empty()) throw DataError("no rankings to evaluate");
  double total = 0.0;
  for (const auto& r : rankings) {
    const auto it = gold.find(r.query_id);
    if (it == gold.end()) throw DataError("query '" + r.query_id + "' has no gold target");
    total += reciprocal_rank(r, it->second, k);
  }
  return total / static_cast<double>(rankings.size());
}

F1Average parse_f1_average(const std::string& name) {
  if (name == "macro") return F1Average::kMacro;
  if (name == "micro") return F1Average::kMicro;
  if (name == "weighted") return F1Average::kWeighted;
  throw UsageError("unknown F1 averaging '" + name + "' (macro, micro, weighted)");
}

F1Breakdown f1_breakdown(const std::map<std::string, std::string>& predictions,
                         const std::map<std::string, std::string>& gold) {
  if (predictions.size() != gold.size()) {
    throw DataError("prediction and gold id sets differ in size");
  }
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0, support = 0;
  };
  std::map<std::string, Counts> counts;
  std::size_t correct = 0;
  for (const auto& [id, truth] : gold) {
    const auto it = predictions.find(id);
    if (it == predictions.end()) throw DataError("no prediction for id '" + id + "'");
    const auto& pred = it->second;
    ++counts[truth].support;
    if (pred == truth) {
      ++counts[truth].tp;
      ++correct;
    } else {
      ++counts[truth].fn;
      ++counts[pred].fp;
    }
  }

  F1Breakdown out;
  std::size_t gold_classes = 0;
  double macro_sum = 0.0;
  double weighted_sum = 0.0;
  for (const auto& [label, c] : counts) {
    ClassScores s;
    s.precision = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
    s.recall = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
    s.f1 = f1_of(s.precision, s.recall);
    s.support = c.support;
    if (c.support > 0) {
      ++gold_classes;
      macro_sum += s.f1;
      weighted_sum += s.f1 * static_cast<double>(c.support);
    }
    out.per_class.emplace(label, s);
  }
  const auto n = static_cast<double>(gold.size());
  out.macro = safe_div(macro_sum, static_cast<double>(gold_classes));
  out.weighted = safe_div(weighted_sum, n);
  // Single-label: total FP = total FN = n - correct.
  const double p = safe_div(static_cast<double>(correct), n);
  out.micro = f1_of(p, p);
  return out;
}

double f1_report(const std::map<std::string, std::string>& predictions,
                 const std::map<std::string, std::string>& gold, F1Average average) {
  const auto b = f1_breakdown(predictions, gold);
  switch (average) {
    case F1Average::kMacro: return b.macro;
    case F1Average::kMicro: return b.micro;
    case F1Average::kWeighted: return b.weighted;
  }
  return b.macro;
}

std::vector<EvalReport> semantic_search_eval(const SentenceVectorStore& query_vectors,
                                             const SentenceVectorStore& target_vectors,
                                             const GoldMapping& gold,
                                             std::span<const std::size_t> k_values,
                                             const ReportLabels& labels) {
  if (k_values.empty()) throw UsageError("at least one k is required");
  if (gold.empty()) throw DataError("gold mapping is empty");
  if (target_vectors.empty()) throw DataError("target store is empty");
  if (query_vectors.dimension() != target_vectors.dimension()) {
    throw DataError("query and target vector dimensions differ");
  }
  const std::size_t max_k = *std::max_element(k_values.begin(), k_values.end());

  // Gather gold queries into one matrix (gold key order).
  const std::size_t dim = target_vectors.dimension();
  std::vector<double> qdata;
  std::vector<const std::string*> qids;
  qdata.reserve(gold.size() * dim);
  for (const auto& [qid, target] : gold) {
    if (!target_vectors.contains(target)) {
      throw DataError("gold target '" + target + "' of query '" + qid + "' has no vector");
    }
    const auto v = query_vectors.vector(qid);
    if (norm(v) == 0.0) throw DataError("zero-norm query vector '" + qid + "'");
    qdata.insert(qdata.end(), v.begin(), v.end());
    qids.push_back(&qid);
  }
  const MatrixView targets = target_vectors.as_matrix();
  for (std::size_t j = 0; j < targets.rows; ++j) {
    if (norm(targets.row(j)) == 0.0) {
      throw DataError("zero-norm target vector '" + target_vectors.ids()[j] + "'");
    }
  }

  std::vector<double> sims(qids.size() * targets.rows);
  kernels::parallel::cosine_matrix({qdata.data(), qids.size(), dim}, targets, sims);

  const auto& tids = target_vectors.ids();
  std::vector<RankedList> rankings(qids.size());
  const auto nq = static_cast<std::ptrdiff_t>(qids.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < nq; ++i) {
    const double* row = sims.data() + i * targets.rows;
    std::vector<std::size_t> order(targets.rows);
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    const std::size_t keep = std::min(max_k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (row[a] != row[b]) return row[a] > row[b];
                        return tids[a] < tids[b];
                      });
    rankings[i].query_id = *qids[i];
    for (std::size_t j = 0; j < keep; ++j) rankings[i].entries.push_back({tids[order[j]], row[order[j]]});
  }

  std::vector<EvalReport> out;
  for (std::size_t k : k_values) {
    out.push_back({labels.system, labels.dataset, labels.target, "mrr", k,
                   mrr_at_k(rankings, gold, k)});
  }
  return out;
}

std::vector<QueryText> load_queries(const std::filesystem::path& path) {
  std::vector<QueryText> out;
  std::set<std::string> seen;
  jsonl::for_each(path, [&](const jsonl::Json& obj, std::size_t line) {
    QueryText q;
    if (obj.contains("question")) {
      q = {jsonl::require_string(obj, "id", line), jsonl::require_string(obj, "question", line)};
    } else if (obj.contains("original_id")) {
      q = {jsonl::require_string(obj, "original_id", line), jsonl::require_string(obj, "text", line)};
    } else {
      q = {jsonl::require_string(obj, "query_id", line), jsonl::require_string(obj, "text", line)};
    }
    if (!seen.insert(q.id).second) {
      throw DataError("line " + std::to_string(line) + ": duplicate query id '" + q.id + "'");
    }
    out.push_back(std::move(q));
  });
  return out;
}

FaqEvalResult faq_retrieval_eval(std::span<const QueryText> queries, const Bm25Index& index,
                                 const TokenMatrixStore& query_matrices,
                                 const TokenMatrixStore& doc_matrices, const GoldMapping& gold,
                                 const TwoStageConfig& config,
                                 std::span<const std::size_t> k_values,
                                 const ReportLabels& labels) {
  config.validate();
  if (k_values.empty()) throw UsageError("at least one k is required");
  if (queries.empty()) throw DataError("no queries to evaluate");
  const std::size_t max_k = *std::max_element(k_values.begin(), k_values.end());

  FaqEvalResult result;
  result.bm25_run.reserve(queries.size());
  result.two_stage_run.reserve(queries.size());
  for (const auto& q : queries) {
    auto first = index.top_k(q.text, std::max(max_k, config.first_stage_k), config.bm25, q.id);
    RankedList stage_one{q.id, {}};
    const std::size_t n_first = std::min(config.first_stage_k, first.entries.size());
    stage_one.entries.assign(first.entries.begin(),
                             first.entries.begin() + static_cast<std::ptrdiff_t>(n_first));
    result.two_stage_run.push_back(rerank(q.id, stage_one, query_matrices, doc_matrices, config));
    first.entries.resize(std::min(max_k, first.entries.size()));
    result.bm25_run.push_back(std::move(first));
  }

  for (const char* system : {kBm25System, kTwoStageSystem}) {
    const auto& run = std::string(system) == kBm25System ? result.bm25_run : result.two_stage_run;
    for (std::size_t k : k_values) {
      result.rows.push_back({system, labels.dataset, labels.target, "mrr", k,
                             mrr_at_k(run, gold, k)});
    }
  }
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    Gain g{k_values[i], result.rows[i].value, result.rows[k_values.size() + i].value, {}};
    if (g.baseline > 0.0) g.percent = 100.0 * g.reranked / g.baseline - 100.0;
    result.gains.push_back(g);
  }
  return result;
}

std::string reports_to_csv(std::span<const EvalReport> rows, std::span<const Gain> gains,
                           const ReportLabels& gain_labels) {
  std::ostringstream out;
  out << "system,dataset,target,metric,k,value\n";
  for (const auto& r : rows) {
    out << csv_field(r.system) << ',' << csv_field(r.dataset) << ',' << csv_field(r.target) << ','
        << csv_field(r.metric) << ',' << (r.k ? std::to_string(*r.k) : "") << ','
        << format_double(r.value) << '\n';
  }
  for (const auto& g : gains) {
    out << kTwoStageSystem << ',' << csv_field(gain_labels.dataset) << ','
        << csv_field(gain_labels.target) << ",gain_pct," << g.k << ','
        << (g.percent ? format_double(*g.percent) : "NA") << '\n';
  }
  return out.str();
}

std::string reports_to_json(std::span<const EvalReport> rows, std::span<const Gain> gains) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json obj{{"system", r.system}, {"dataset", r.dataset}, {"target", r.target},
                       {"metric", r.metric}, {"value", r.value}};
    obj["k"] = r.k ? nlohmann::json(*r.k) : nlohmann::json(nullptr);
    arr.push_back(std::move(obj));
  }
  nlohmann::json doc{{"reports", std::move(arr)}};
  if (!gains.empty()) {
    nlohmann::json garr = nlohmann::json::array();
    for (const auto& g : gains) {
      nlohmann::json obj{{"k", g.k}, {"baseline", g.baseline}, {"reranked", g.reranked}};
      obj["gain_pct"] = g.percent ? nlohmann::json(*g.percent) : nlohmann::json(nullptr);
      garr.push_back(std::move(obj));
    }
    doc["gains"] = std::move(garr);
  }
  return doc.dump(2);
}

}  // namespace faqir
