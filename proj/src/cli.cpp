#include "faqir/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "faqir/augmentation.hpp"
#include "faqir/bm25.hpp"
#include "faqir/corpus.hpp"
#include "faqir/embedding.hpp"
#include "faqir/error.hpp"
#include "faqir/evaluation.hpp"
#include "faqir/jsonl.hpp"
#include "faqir/reranker.hpp"
#include "faqir/tokenizer.hpp"

namespace faqir::cli {

namespace {

using Json = nlohmann::json;

struct TokenizerFlags {
  bool no_lowercase = false;
  bool strip_diacritics = false;
  std::size_t min_token_length = 1;
  std::string stopwords;

  void attach(CLI::App* cmd) {
    cmd->add_flag("--no-lowercase", no_lowercase, "Keep original letter case");
    cmd->add_flag("--strip-diacritics", strip_diacritics, "Fold accented Latin letters");
    cmd->add_option("--min-token-length", min_token_length, "Drop shorter tokens")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--stopwords", stopwords, "Stopword file (one per line)");
  }

  TokenizerConfig config() const {
    TokenizerConfig c;
    c.lowercase = !no_lowercase;
    c.strip_diacritics = strip_diacritics;
    c.min_token_length = min_token_length;
    if (!stopwords.empty()) c.stopwords = load_stopwords(stopwords);
    return c;
  }
};

void attach_bm25(CLI::App* cmd, Bm25Params& p) {
  cmd->add_option("--k1", p.k1, "BM25+ term saturation")->capture_default_str();
  cmd->add_option("--b", p.b, "BM25+ length normalization")->capture_default_str();
  cmd->add_option("--delta", p.delta, "BM25+ lower bound for matching terms")
      ->capture_default_str();
}

CLI::Option* attach_k_list(CLI::App* cmd, std::vector<std::size_t>& ks) {
  return cmd->add_option("--k", ks, "Comma-separated MRR cutoffs")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::map<std::string, std::string> load_labels(const std::string& path) {
  std::map<std::string, std::string> labels;
  jsonl::for_each(path, [&](const Json& obj, std::size_t line) {
    auto id = jsonl::require_string(obj, "id", line);
    if (!labels.emplace(id, jsonl::require_string(obj, "label", line)).second) {
      throw DataError("line " + std::to_string(line) + ": duplicate id '" + id + "'");
    }
  });
  return labels;
}

ColumnMap parse_column_map(const std::string& spec) {
  ColumnMap map;
  if (spec.empty()) return map;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("column map entry '" + item + "' lacks '='");
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "id") {
      map.id = value;
    } else if (key == "question") {
      map.question = value;
    } else if (key == "category") {
      map.category = value;
    } else if (key == "answer") {
      map.answer = value;
    } else {
      throw UsageError("unknown column map field '" + key + "'");
    }
  }
  return map;
}

Json run_to_json(const RankedList& list) {
  Json ranking = Json::array();
  for (const auto& e : list.entries) ranking.push_back({{"id", e.id}, {"score", e.score}});
  return {{"query_id", list.query_id}, {"ranking", ranking}};
}

void write_report(const std::string& path, const std::string& format,
                  std::span<const EvalReport> rows, std::span<const Gain> gains,
                  const ReportLabels& labels) {
  if (path.empty()) return;
  const bool json = format == "json" ||
                    (format.empty() && std::filesystem::path(path).extension() == ".json");
  auto out = jsonl::open_output(path);
  out << (json ? reports_to_json(rows, gains) + "\n" : reports_to_csv(rows, gains, labels));
  if (!out) throw DataError("failed writing " + path);
}

void print_reports(std::ostream& out, std::span<const EvalReport> rows) {
  for (const auto& r : rows) {
    out << (r.system.empty() ? "" : r.system + " ") << r.metric << "@" << (r.k ? *r.k : 0)
        << " = " << r.value << '\n';
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FAQ retrieval and data-augmentation toolkit", "faqir"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  bool json = false;
  std::function<void()> action;
  const auto emit = [&](const Json& summary, const std::function<void()>& human) {
    if (json) {
      out << summary.dump(2) << '\n';
    } else {
      human();
    }
  };
  const auto json_flag = [&](CLI::App* cmd) {
    cmd->add_flag("--json", json, "Print a machine-readable summary");
  };

  // ingest -----------------------------------------------------------------
  struct {
    std::string input, format = "jsonl", map, out;
    char delimiter = ',';
  } ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load a JSONL or CSV export into canonical JSONL");
  ingest_cmd->add_option("--input", ingest.input, "Source file")->required();
  ingest_cmd->add_option("--format", ingest.format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();
  ingest_cmd->add_option("--delimiter", ingest.delimiter, "CSV delimiter");
  ingest_cmd->add_option("--map", ingest.map,
                         "CSV column map, e.g. question=pergunta,category=categoria,answer=resposta");
  ingest_cmd->add_option("--out", ingest.out, "Canonical JSONL output")->required();
  json_flag(ingest_cmd);
  ingest_cmd->callback([&] {
    action = [&] {
      LoadOptions opts;
      opts.format = ingest.format == "csv" ? CorpusFormat::kCsv : CorpusFormat::kJsonl;
      opts.columns = parse_column_map(ingest.map);
      opts.delimiter = ingest.delimiter;
      const auto corpus = load_corpus(ingest.input, opts);
      write_corpus(ingest.out, corpus);
      emit({{"records", corpus.size()}, {"out", ingest.out}},
           [&] { out << "ingested " << corpus.size() << " records -> " << ingest.out << '\n'; });
    };
  });

  // stats ------------------------------------------------------------------
  struct {
    std::string corpus, words = "whitespace";
    std::size_t top = 3;
    TokenizerFlags tok;
  } stats;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("--corpus", stats.corpus, "Corpus JSONL")->required();
  stats_cmd->add_option("--top", stats.top, "Number of largest categories")->capture_default_str();
  stats_cmd->add_option("--words", stats.words, "Word counting: whitespace or tokenizer")
      ->check(CLI::IsMember({"whitespace", "tokenizer"}))
      ->capture_default_str();
  stats.tok.attach(stats_cmd);
  json_flag(stats_cmd);
  stats_cmd->callback([&] {
    action = [&] {
      StatsOptions opts;
      opts.top_k = stats.top;
      opts.word_mode =
          stats.words == "tokenizer" ? WordCountMode::kTokenizer : WordCountMode::kWhitespace;
      opts.tokenizer = stats.tok.config();
      const auto s = compute_stats(load_corpus(stats.corpus), opts);
      const auto column = [](const ColumnStats& c) {
        return Json{{"avg_words", c.avg_words}, {"unique", c.unique_values}};
      };
      const Json summary{{"records", s.record_count},
                         {"question", column(s.question)},
                         {"category", column(s.category)},
                         {"answer", column(s.answer)},
                         {"categories", s.category_histogram.size()},
                         {"categories_in_domain", s.categories_in_domain},
                         {"ood_count", s.ood_count},
                         {"top_counts", s.top_counts},
                         {"top_counts_in_domain", s.top_counts_in_domain},
                         {"short_questions", s.short_questions},
                         {"category_histogram", s.category_histogram}};
      emit(summary, [&] {
        out << "records:              " << s.record_count << '\n'
            << "question avg words:   " << s.question.avg_words << " (unique "
            << s.question.unique_values << ")\n"
            << "category avg words:   " << s.category.avg_words << " (unique "
            << s.category.unique_values << ")\n"
            << "answer avg words:     " << s.answer.avg_words << " (unique "
            << s.answer.unique_values << ")\n"
            << "categories:           " << s.category_histogram.size() << " ("
            << s.categories_in_domain << " excluding " << kOutOfDomainCategory << ")\n"
            << kOutOfDomainCategory << " records:          " << s.ood_count << '\n'
            << "questions < 5 words:  " << s.short_questions << '\n'
            << "top categories:       " << Json(s.top_counts).dump() << '\n'
            << "top in-domain:        " << Json(s.top_counts_in_domain).dump() << '\n';
      });
    };
  });

  // split ------------------------------------------------------------------
  struct {
    std::string corpus, train_out, test_out;
    double fraction = 0.7;
    std::uint64_t seed = 42;
  } split;
  auto* split_cmd = app.add_subcommand("split", "Seeded train/test holdout split");
  split_cmd->add_option("--corpus", split.corpus, "Corpus JSONL")->required();
  split_cmd->add_option("--train-fraction", split.fraction, "Fraction in (0, 1]")
      ->capture_default_str();
  split_cmd->add_option("--seed", split.seed, "Permutation seed")->capture_default_str();
  split_cmd->add_option("--train-out", split.train_out, "Training JSONL")->required();
  split_cmd->add_option("--test-out", split.test_out, "Test JSONL")->required();
  json_flag(split_cmd);
  split_cmd->callback([&] {
    action = [&] {
      const auto parts = split_holdout(load_corpus(split.corpus), split.fraction, split.seed);
      write_corpus(split.train_out, parts.train);
      write_corpus(split.test_out, parts.test);
      emit({{"train", parts.train.size()}, {"test", parts.test.size()}, {"seed", split.seed}}, [&] {
        out << "train " << parts.train.size() << " -> " << split.train_out << "\ntest  "
            << parts.test.size() << " -> " << split.test_out << '\n';
      });
    };
  });

  // index build ------------------------------------------------------------
  struct {
    std::string corpus, field = "answer", out;
    TokenizerFlags tok;
  } index_build;
  auto* index_cmd = app.add_subcommand("index", "Inverted index operations");
  index_cmd->require_subcommand(1);
  auto* build_cmd = index_cmd->add_subcommand("build", "Build a BM25+ index over a corpus field");
  build_cmd->add_option("--corpus", index_build.corpus, "Corpus JSONL")->required();
  build_cmd->add_option("--field", index_build.field, "answer or question")
      ->check(CLI::IsMember({"answer", "question"}))
      ->capture_default_str();
  build_cmd->add_option("--out", index_build.out, "Index JSON")->required();
  index_build.tok.attach(build_cmd);
  json_flag(build_cmd);
  build_cmd->callback([&] {
    action = [&] {
      const auto corpus = load_corpus(index_build.corpus);
      std::vector<Document> docs;
      docs.reserve(corpus.size());
      for (const auto& r : corpus) {
        docs.push_back({r.id, index_build.field == "question" ? r.question : r.answer});
      }
      const auto index = Bm25Index::build(docs, index_build.tok.config());
      index.save(index_build.out);
      emit({{"docs", index.doc_count()},
            {"terms", index.postings().size()},
            {"avg_doc_length", index.avg_doc_length()}},
           [&] {
             out << "indexed " << index.doc_count() << " docs, " << index.postings().size()
                 << " terms, avg length " << index.avg_doc_length() << " -> "
                 << index_build.out << '\n';
           });
    };
  });

  // search -----------------------------------------------------------------
  struct {
    std::string index, query;
    std::size_t k = 10;
    Bm25Params params;
  } search;
  auto* search_cmd = app.add_subcommand("search", "BM25+ top-k search");
  search_cmd->add_option("--index", search.index, "Index JSON")->required();
  search_cmd->add_option("--query", search.query, "Query text")->required();
  search_cmd->add_option("--k", search.k, "Number of results")->capture_default_str();
  attach_bm25(search_cmd, search.params);
  json_flag(search_cmd);
  search_cmd->callback([&] {
    action = [&] {
      const auto index = Bm25Index::load(search.index);
      const auto result = index.top_k(search.query, search.k, search.params, "query");
      emit(run_to_json(result), [&] {
        for (std::size_t i = 0; i < result.entries.size(); ++i) {
          out << i + 1 << '\t' << result.entries[i].id << '\t' << result.entries[i].score << '\n';
        }
      });
    };
  });

  // augment ----------------------------------------------------------------
  auto* augment_cmd = app.add_subcommand("augment", "Data augmentation");
  augment_cmd->require_subcommand(1);

  struct {
    std::string corpus, lexicon, stopwords, out, original_vectors, pair_vectors;
    std::uint64_t seed = 42;
  } synonym;
  auto* synonym_cmd = augment_cmd->add_subcommand("synonym", "One-word synonym substitution");
  synonym_cmd->add_option("--corpus", synonym.corpus, "Corpus JSONL (questions)")->required();
  synonym_cmd->add_option("--lexicon", synonym.lexicon, "TSV lexicon")->required();
  synonym_cmd->add_option("--stopwords", synonym.stopwords, "Words never substituted");
  synonym_cmd->add_option("--seed", synonym.seed, "Substitution seed")->capture_default_str();
  synonym_cmd->add_option("--out", synonym.out, "Pairs JSONL")->required();
  auto* ov = synonym_cmd->add_option("--original-vectors", synonym.original_vectors,
                                     "Question vectors keyed by record id");
  auto* pv = synonym_cmd->add_option("--pair-vectors", synonym.pair_vectors,
                                     "Paraphrase vectors keyed by record id");
  ov->needs(pv);
  pv->needs(ov);
  json_flag(synonym_cmd);
  synonym_cmd->callback([&] {
    action = [&] {
      std::set<std::string> stop;
      if (!synonym.stopwords.empty()) stop = load_stopwords(synonym.stopwords);
      const auto lexicon = load_lexicon(synonym.lexicon, stop);
      auto run = synonym_augment_corpus(load_corpus(synonym.corpus), lexicon, synonym.seed);
      if (!synonym.original_vectors.empty()) {
        const auto originals = SentenceVectorStore::load(synonym.original_vectors);
        const auto paraphrases = SentenceVectorStore::load(synonym.pair_vectors);
        for (auto& p : run.pairs) {
          p.similarity = cosine(originals.vector(p.original_id), paraphrases.vector(p.original_id));
        }
      }
      write_pairs(synonym.out, run.pairs);
      const auto range = similarity_range(run.pairs);
      Json summary{{"augmented", run.pairs.size()}, {"skipped", run.skipped_ids.size()}};
      if (range.count > 0) summary["similarity"] = {{"min", range.min}, {"max", range.max}};
      emit(summary, [&] {
        out << "augmented " << run.pairs.size() << ", not augmentable " << run.skipped_ids.size()
            << " -> " << synonym.out << '\n';
        if (range.count > 0) out << "similarity range [" << range.min << ", " << range.max << "]\n";
      });
    };
  });

  struct {
    std::string candidates, corpus, out;
  } dedup;
  auto* dedup_cmd = augment_cmd->add_subcommand("dedup", "Remove redundant paraphrase candidates");
  dedup_cmd->add_option("--candidates", dedup.candidates, "Candidates JSONL")->required();
  dedup_cmd->add_option("--corpus", dedup.corpus, "Corpus JSONL; drops copies of the original");
  dedup_cmd->add_option("--out", dedup.out, "Deduplicated candidates JSONL")->required();
  json_flag(dedup_cmd);
  dedup_cmd->callback([&] {
    action = [&] {
      const auto input = load_candidates(dedup.candidates);
      std::map<std::string, std::string> originals;
      if (!dedup.corpus.empty()) {
        for (const auto& r : load_corpus(dedup.corpus)) originals.emplace(r.id, r.question);
      }
      const auto kept = dedup_candidates(input, dedup.corpus.empty() ? nullptr : &originals);
      write_candidates(dedup.out, kept);
      const auto report = expansion_report(kept);
      emit({{"input", input.size()},
            {"kept", kept.size()},
            {"originals", report.originals},
            {"expansion_factor", report.expansion_factor},
            {"min_per_original", report.min_per_original},
            {"max_per_original", report.max_per_original}},
           [&] {
             out << "kept " << kept.size() << " of " << input.size() << " candidates for "
                 << report.originals << " originals (expansion " << report.expansion_factor
                 << "x, per original " << report.min_per_original << ".."
                 << report.max_per_original << ") -> " << dedup.out << '\n';
           });
    };
  });

  struct {
    std::string original_vectors, candidates, candidate_vectors, max_out, min_out;
    std::optional<double> filter_low, filter_high;
  } bucket;
  auto* bucket_cmd = augment_cmd->add_subcommand("bucketize", "Most/least similar paraphrase per question");
  bucket_cmd->add_option("--original-vectors", bucket.original_vectors, "Question vectors")->required();
  bucket_cmd->add_option("--candidates", bucket.candidates, "Candidates JSONL")->required();
  bucket_cmd->add_option("--candidate-vectors", bucket.candidate_vectors, "Candidate vectors")
      ->required();
  bucket_cmd->add_option("--max-out", bucket.max_out, "MAX_SIM pairs JSONL")->required();
  bucket_cmd->add_option("--min-out", bucket.min_out, "MIN_SIM pairs JSONL")->required();
  bucket_cmd->add_option("--filter-low", bucket.filter_low, "Drop picks below this similarity");
  bucket_cmd->add_option("--filter-high", bucket.filter_high, "Drop picks above this similarity");
  json_flag(bucket_cmd);
  bucket_cmd->callback([&] {
    action = [&] {
      auto b = bucketize(SentenceVectorStore::load(bucket.original_vectors),
                         load_candidates(bucket.candidates),
                         SentenceVectorStore::load(bucket.candidate_vectors));
      if (bucket.filter_low || bucket.filter_high) {
        const double lo = bucket.filter_low.value_or(-1.0);
        const double hi = bucket.filter_high.value_or(1.0);
        b.max_set = filter_by_similarity(b.max_set, lo, hi);
        b.min_set = filter_by_similarity(b.min_set, lo, hi);
      }
      write_pairs(bucket.max_out, b.max_set);
      write_pairs(bucket.min_out, b.min_set);
      const auto rmax = similarity_range(b.max_set);
      const auto rmin = similarity_range(b.min_set);
      const auto range_json = [](const SimilarityRange& r) {
        return Json{{"count", r.count}, {"min", r.min}, {"max", r.max}};
      };
      emit({{"max_sim", range_json(rmax)}, {"min_sim", range_json(rmin)}}, [&] {
        out << "MAX_SIM " << rmax.count << " pairs, similarity [" << rmax.min << ", " << rmax.max
            << "] -> " << bucket.max_out << '\n'
            << "MIN_SIM " << rmin.count << " pairs, similarity [" << rmin.min << ", " << rmin.max
            << "] -> " << bucket.min_out << '\n';
      });
    };
  });

  struct {
    std::string pairs, out;
    std::size_t bins = 20;
    double low = 0.0, high = 1.0;
  } hist;
  auto* hist_cmd = augment_cmd->add_subcommand("histogram", "Similarity histogram of pairs");
  hist_cmd->add_option("--pairs", hist.pairs, "Pairs JSONL")->required();
  hist_cmd->add_option("--bins", hist.bins, "Number of bins")->capture_default_str();
  hist_cmd->add_option("--low", hist.low, "Range start")->capture_default_str();
  hist_cmd->add_option("--high", hist.high, "Range end")->capture_default_str();
  hist_cmd->add_option("--out", hist.out, "Histogram CSV")->required();
  json_flag(hist_cmd);
  hist_cmd->callback([&] {
    action = [&] {
      const auto pairs = load_pairs(hist.pairs);
      const auto h = similarity_histogram(pairs, hist.bins, hist.low, hist.high);
      write_histogram_csv(hist.out, h);
      emit({{"pairs", pairs.size()}, {"counts", h.counts}, {"out_of_range", h.out_of_range}}, [&] {
        out << "binned " << pairs.size() - h.out_of_range << " of " << pairs.size()
            << " pairs into " << hist.bins << " bins -> " << hist.out << '\n';
      });
    };
  });

  // rerank -----------------------------------------------------------------
  struct {
    std::string run, query_matrices, doc_matrices, out;
    std::size_t final_k = 10, max_len = 0;
    bool raw_dot = false;
  } rr;
  auto* rerank_cmd = app.add_subcommand("rerank", "MaxSim re-ranking of a first-stage run");
  rerank_cmd->add_option("--run", rr.run, "First-stage run JSONL")->required();
  rerank_cmd->add_option("--query-matrices", rr.query_matrices, "Query token matrices")->required();
  rerank_cmd->add_option("--doc-matrices", rr.doc_matrices, "Document token matrices")->required();
  rerank_cmd->add_option("--final-k", rr.final_k, "Results kept per query")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  rerank_cmd->add_option("--max-len", rr.max_len, "Reject matrices with more rows (0 = off)");
  rerank_cmd->add_flag("--raw-dot", rr.raw_dot, "Use raw dot products instead of cosine");
  rerank_cmd->add_option("--out", rr.out, "Re-ranked run JSONL")->required();
  json_flag(rerank_cmd);
  rerank_cmd->callback([&] {
    action = [&] {
      const auto queries = TokenMatrixStore::load(rr.query_matrices, rr.max_len);
      const auto docs = TokenMatrixStore::load(rr.doc_matrices, rr.max_len);
      std::vector<RankedList> result;
      for (const auto& list : load_run(rr.run)) {
        TwoStageConfig config;
        config.final_k = rr.final_k;
        config.first_stage_k = std::max(rr.final_k, list.entries.size());
        config.normalize_tokens = !rr.raw_dot;
        result.push_back(rerank(list.query_id, list, queries, docs, config));
      }
      write_run(rr.out, result);
      emit({{"queries", result.size()}, {"out", rr.out}},
           [&] { out << "re-ranked " << result.size() << " queries -> " << rr.out << '\n'; });
    };
  });

  // retrieve two-stage -----------------------------------------------------
  struct {
    std::string index, queries, query_matrices, doc_matrices, out;
    std::size_t max_len = 0;
    bool raw_dot = false;
    TwoStageConfig config;
  } ts;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Retrieval pipelines");
  retrieve_cmd->require_subcommand(1);
  auto* two_stage_cmd = retrieve_cmd->add_subcommand("two-stage", "BM25+ then MaxSim re-ranking");
  two_stage_cmd->add_option("--index", ts.index, "Index JSON")->required();
  two_stage_cmd->add_option("--queries", ts.queries, "Queries JSONL")->required();
  two_stage_cmd->add_option("--query-matrices", ts.query_matrices, "Query token matrices")
      ->required();
  two_stage_cmd->add_option("--doc-matrices", ts.doc_matrices, "Document token matrices")
      ->required();
  two_stage_cmd->add_option("--first-stage-k", ts.config.first_stage_k, "BM25+ candidates")
      ->capture_default_str();
  two_stage_cmd->add_option("--final-k", ts.config.final_k, "Results kept per query")
      ->capture_default_str();
  two_stage_cmd->add_option("--max-len", ts.max_len, "Reject matrices with more rows (0 = off)");
  two_stage_cmd->add_flag("--raw-dot", ts.raw_dot, "Use raw dot products instead of cosine");
  attach_bm25(two_stage_cmd, ts.config.bm25);
  two_stage_cmd->add_option("--out", ts.out, "Run JSONL")->required();
  json_flag(two_stage_cmd);
  two_stage_cmd->callback([&] {
    action = [&] {
      ts.config.normalize_tokens = !ts.raw_dot;
      ts.config.validate();
      const auto index = Bm25Index::load(ts.index);
      const auto queries = TokenMatrixStore::load(ts.query_matrices, ts.max_len);
      const auto docs = TokenMatrixStore::load(ts.doc_matrices, ts.max_len);
      std::vector<RankedList> result;
      for (const auto& q : load_queries(ts.queries)) {
        result.push_back(two_stage_retrieve(q.text, q.id, index, queries, docs, ts.config));
      }
      write_run(ts.out, result);
      emit({{"queries", result.size()}, {"out", ts.out}},
           [&] { out << "retrieved " << result.size() << " queries -> " << ts.out << '\n'; });
    };
  });

  // eval -------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Evaluation");
  eval_cmd->require_subcommand(1);

  struct {
    std::string run, gold;
    std::vector<std::size_t> ks{1, 5};
  } mrr;
  auto* mrr_cmd = eval_cmd->add_subcommand("mrr", "MRR@k of a run");
  mrr_cmd->add_option("--run", mrr.run, "Run JSONL")->required();
  mrr_cmd->add_option("--gold", mrr.gold, "Gold JSONL {query_id, target_id}")->required();
  attach_k_list(mrr_cmd, mrr.ks);
  json_flag(mrr_cmd);
  mrr_cmd->callback([&] {
    action = [&] {
      const auto run = load_run(mrr.run);
      const auto gold = load_gold(mrr.gold);
      std::vector<EvalReport> rows;
      for (std::size_t k : mrr.ks) rows.push_back({"", "", "", "mrr", k, mrr_at_k(run, gold, k)});
      emit(Json::parse(reports_to_json(rows)), [&] { print_reports(out, rows); });
    };
  });

  struct {
    std::string predictions, gold, average = "macro";
  } f1;
  auto* f1_cmd = eval_cmd->add_subcommand("f1", "F1 of label predictions");
  f1_cmd->add_option("--predictions", f1.predictions, "JSONL {id, label}")->required();
  f1_cmd->add_option("--gold", f1.gold, "JSONL {id, label}")->required();
  f1_cmd->add_option("--average", f1.average, "macro, micro or weighted")
      ->check(CLI::IsMember({"macro", "micro", "weighted"}))
      ->capture_default_str();
  json_flag(f1_cmd);
  f1_cmd->callback([&] {
    action = [&] {
      const auto b = f1_breakdown(load_labels(f1.predictions), load_labels(f1.gold));
      const double value = f1.average == "micro"      ? b.micro
                           : f1.average == "weighted" ? b.weighted
                                                      : b.macro;
      Json per_class = Json::object();
      for (const auto& [label, s] : b.per_class) {
        per_class[label] = {{"precision", s.precision},
                            {"recall", s.recall},
                            {"f1", s.f1},
                            {"support", s.support}};
      }
      emit({{"average", f1.average},
            {"f1", value},
            {"macro", b.macro},
            {"micro", b.micro},
            {"weighted", b.weighted},
            {"per_class", per_class}},
           [&] { out << f1.average << " F1 = " << value << '\n'; });
    };
  });

  struct {
    std::string query_vectors, target_vectors, gold, corpus, target = "answer", system, dataset,
        out, format;
    std::vector<std::size_t> ks{1, 5};
  } sem;
  auto* sem_cmd = eval_cmd->add_subcommand("semantic", "Cosine semantic-search MRR@k");
  sem_cmd->add_option("--query-vectors", sem.query_vectors, "Query vectors")->required();
  sem_cmd->add_option("--target-vectors", sem.target_vectors, "Target vectors")->required();
  auto* sem_gold = sem_cmd->add_option("--gold", sem.gold, "Gold JSONL {query_id, target_id}");
  auto* sem_corpus =
      sem_cmd->add_option("--corpus", sem.corpus, "Derive gold from this corpus and --target");
  sem_gold->excludes(sem_corpus);
  sem_cmd->add_option("--target", sem.target, "question, category or answer")
      ->check(CLI::IsMember({"question", "category", "answer"}))
      ->capture_default_str();
  sem_cmd->add_option("--system", sem.system, "Report label");
  sem_cmd->add_option("--dataset", sem.dataset, "Report label");
  attach_k_list(sem_cmd, sem.ks);
  sem_cmd->add_option("--out", sem.out, "Report file (CSV, or JSON for .json)");
  sem_cmd->add_option("--format", sem.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  json_flag(sem_cmd);
  sem_cmd->callback([&] {
    action = [&] {
      GoldMapping gold;
      if (!sem.gold.empty()) {
        gold = load_gold(sem.gold);
      } else if (!sem.corpus.empty()) {
        gold = gold_from_corpus(load_corpus(sem.corpus),
                                sem.target == "category" ? GoldTarget::kCategory : GoldTarget::kId);
      } else {
        throw UsageError("eval semantic needs --gold or --corpus");
      }
      const ReportLabels labels{sem.system, sem.dataset, sem.target};
      const auto rows = semantic_search_eval(SentenceVectorStore::load(sem.query_vectors),
                                             SentenceVectorStore::load(sem.target_vectors), gold,
                                             sem.ks, labels);
      write_report(sem.out, sem.format, rows, {}, labels);
      emit(Json::parse(reports_to_json(rows)), [&] { print_reports(out, rows); });
    };
  });

  struct {
    std::string index, queries, query_matrices, doc_matrices, gold, dataset, out, format;
    std::vector<std::size_t> ks{1, 5};
    std::size_t max_len = 0;
    bool raw_dot = false;
    TwoStageConfig config;
  } faq;
  auto* faq_cmd = eval_cmd->add_subcommand("faq", "BM25+ vs two-stage FAQ retrieval MRR@k");
  faq_cmd->add_option("--index", faq.index, "Index JSON")->required();
  faq_cmd->add_option("--queries", faq.queries, "Queries JSONL")->required();
  faq_cmd->add_option("--query-matrices", faq.query_matrices, "Query token matrices")->required();
  faq_cmd->add_option("--doc-matrices", faq.doc_matrices, "Document token matrices")->required();
  faq_cmd->add_option("--gold", faq.gold, "Gold JSONL (default: query id = answer id)");
  faq_cmd->add_option("--first-stage-k", faq.config.first_stage_k, "BM25+ candidates")
      ->capture_default_str();
  faq_cmd->add_option("--final-k", faq.config.final_k, "Results kept per query")
      ->capture_default_str();
  faq_cmd->add_option("--max-len", faq.max_len, "Reject matrices with more rows (0 = off)");
  faq_cmd->add_flag("--raw-dot", faq.raw_dot, "Use raw dot products instead of cosine");
  attach_bm25(faq_cmd, faq.config.bm25);
  attach_k_list(faq_cmd, faq.ks);
  faq_cmd->add_option("--dataset", faq.dataset, "Report label");
  faq_cmd->add_option("--out", faq.out, "Report file (CSV, or JSON for .json)");
  faq_cmd->add_option("--format", faq.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  json_flag(faq_cmd);
  faq_cmd->callback([&] {
    action = [&] {
      faq.config.normalize_tokens = !faq.raw_dot;
      faq.config.validate();
      const auto index = Bm25Index::load(faq.index);
      const auto queries = load_queries(faq.queries);
      GoldMapping gold;
      if (!faq.gold.empty()) {
        gold = load_gold(faq.gold);
      } else {
        for (const auto& q : queries) gold.emplace(q.id, q.id);
      }
      const ReportLabels labels{"", faq.dataset, "answer"};
      const auto result =
          faq_retrieval_eval(queries, index, TokenMatrixStore::load(faq.query_matrices, faq.max_len),
                             TokenMatrixStore::load(faq.doc_matrices, faq.max_len), gold,
                             faq.config, faq.ks, labels);
      write_report(faq.out, faq.format, result.rows, result.gains, labels);
      emit(Json::parse(reports_to_json(result.rows, result.gains)), [&] {
        print_reports(out, result.rows);
        for (const auto& g : result.gains) {
          out << "gain@" << g.k << " = "
              << (g.percent ? std::to_string(*g.percent) + "%" : std::string("NA")) << '\n';
        }
      });
    };
  });

  struct {
    std::string triplets, gold, query_vectors, answer_vectors, sample_out;
    std::uint64_t seed = 42;
  } trip;
  auto* trip_cmd = eval_cmd->add_subcommand("triplets", "Squared-L2 triplet margins");
  auto* trip_file = trip_cmd->add_option("--triplets", trip.triplets, "Triplets JSONL");
  auto* trip_gold =
      trip_cmd->add_option("--gold", trip.gold, "Sample one triplet per gold query instead");
  trip_file->excludes(trip_gold);
  trip_cmd->add_option("--seed", trip.seed, "Negative sampling seed")->capture_default_str();
  trip_cmd->add_option("--sample-out", trip.sample_out, "Write sampled triplets here");
  trip_cmd->add_option("--query-vectors", trip.query_vectors, "Query vectors")->required();
  trip_cmd->add_option("--answer-vectors", trip.answer_vectors, "Answer vectors")->required();
  json_flag(trip_cmd);
  trip_cmd->callback([&] {
    action = [&] {
      const auto queries = SentenceVectorStore::load(trip.query_vectors);
      const auto answers = SentenceVectorStore::load(trip.answer_vectors);
      std::vector<Triplet> triplets;
      if (!trip.triplets.empty()) {
        triplets = load_triplets(trip.triplets);
      } else if (!trip.gold.empty()) {
        triplets = sample_triplets(load_gold(trip.gold), answers.ids(), trip.seed);
        if (!trip.sample_out.empty()) write_triplets(trip.sample_out, triplets);
      } else {
        throw UsageError("eval triplets needs --triplets or --gold");
      }
      const auto s = evaluate_triplets(triplets, queries, answers);
      emit({{"triplets", s.total},
            {"satisfied", s.satisfied},
            {"fraction", s.fraction()},
            {"mean_margin", s.mean_margin}},
           [&] {
             out << s.satisfied << " of " << s.total << " triplets satisfied (" << s.fraction()
                 << "), mean margin " << s.mean_margin << '\n';
           });
    };
  });

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (action) action();
    return kSuccess;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace faqir::cli
