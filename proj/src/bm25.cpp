#include "faqir/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "faqir/error.hpp"
#include "faqir/jsonl.hpp"
#include "faqir/kernels.hpp"

namespace faqir {

using Json = nlohmann::json;

namespace {

bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

Json config_to_json(const TokenizerConfig& c) {
  return Json{{"lowercase", c.lowercase},
              {"strip_diacritics", c.strip_diacritics},
              {"min_token_length", c.min_token_length},
              {"stopwords", c.stopwords}};
}

TokenizerConfig config_from_json(const Json& j) {
  TokenizerConfig c;
  c.lowercase = j.at("lowercase").get<bool>();
  c.strip_diacritics = j.at("strip_diacritics").get<bool>();
  c.min_token_length = j.at("min_token_length").get<std::size_t>();
  c.stopwords = j.at("stopwords").get<std::set<std::string>>();
  return c;
}

}  // namespace

void Bm25Params::validate() const {
  if (!std::isfinite(k1) || k1 <= 0.0) throw UsageError("k1 must be finite and > 0");
  if (!std::isfinite(b) || b < 0.0 || b > 1.0) throw UsageError("b must be in [0, 1]");
  if (!std::isfinite(delta) || delta < 0.0) throw UsageError("delta must be finite and >= 0");
}

std::vector<std::string> RankedList::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

void sort_ranked(std::vector<ScoredDoc>& entries) {
  std::sort(entries.begin(), entries.end(), ranks_before);
}

Bm25Index Bm25Index::build(std::span<const Document> docs, const TokenizerConfig& config) {
  Bm25Index index{Tokenizer(config)};

  std::vector<const Document*> sorted;
  sorted.reserve(docs.size());
  for (const auto& d : docs) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(),
            [](const Document* a, const Document* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->id == sorted[i - 1]->id) {
      throw DataError("duplicate document id '" + sorted[i]->id + "'");
    }
  }

  for (const Document* d : sorted) {
    const auto ordinal = static_cast<std::uint32_t>(index.doc_ids_.size());
    const auto tokens = index.tokenizer_.tokenize(d->text);
    std::map<std::string_view, std::uint32_t> tf;
    for (const auto& t : tokens) ++tf[t];
    for (const auto& [term, count] : tf) {
      index.postings_[std::string(term)].push_back({ordinal, count});
    }
    index.doc_ids_.push_back(d->id);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
  }
  if (index.postings_.empty()) {
    throw DataError("no document contains any token after tokenization");
  }
  index.finalize();
  return index;
}

void Bm25Index::finalize() {
  doc_lookup_.clear();
  for (std::uint32_t i = 0; i < doc_ids_.size(); ++i) doc_lookup_.emplace(doc_ids_[i], i);
  const double total = std::accumulate(doc_lengths_.begin(), doc_lengths_.end(), 0.0);
  avg_doc_length_ = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());
}

std::optional<std::uint32_t> Bm25Index::find_doc(std::string_view id) const {
  const auto it = doc_lookup_.find(std::string(id));
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const Posting> Bm25Index::postings(const std::string& term) const {
  const auto it = postings_.find(term);
  if (it == postings_.end()) return {};
  return it->second;
}

std::size_t Bm25Index::document_frequency(const std::string& term) const {
  return postings(term).size();
}

double Bm25Index::idf(const std::string& term) const {
  const std::size_t df = document_frequency(term);
  if (df == 0) return 0.0;
  return std::log((static_cast<double>(doc_count()) + 1.0) / static_cast<double>(df));
}

std::vector<std::string> Bm25Index::analyze(std::string_view query) const {
  return tokenizer_.tokenize(query);
}

double Bm25Index::score(std::string_view query, std::string_view doc_id,
                        const Bm25Params& params) const {
  params.validate();
  const auto ordinal = find_doc(doc_id);
  if (!ordinal) throw DataError("unknown document id '" + std::string(doc_id) + "'");

  const double len_norm =
      params.k1 * (1.0 - params.b +
                   params.b * static_cast<double>(doc_lengths_[*ordinal]) / avg_doc_length_);
  double total = 0.0;
  for (const auto& term : analyze(query)) {
    const auto list = postings(term);
    const auto it = std::lower_bound(list.begin(), list.end(), *ordinal,
                                     [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    if (it == list.end() || it->doc != *ordinal) continue;
    const double tf = it->tf;
    total += idf(term) * ((params.k1 + 1.0) * tf / (len_norm + tf) + params.delta);
  }
  return total;
}

std::vector<double> Bm25Index::score_all(std::string_view query, const Bm25Params& params) const {
  params.validate();
  std::vector<kernels::TermWeight> terms;
  for (const auto& term : analyze(query)) {
    const auto list = postings(term);
    if (!list.empty()) terms.push_back({list, idf(term)});
  }
  std::vector<double> scores(doc_count(), 0.0);
  const kernels::Bm25Norm norm{params.k1, params.b, params.delta, avg_doc_length_, doc_lengths_};
  kernels::parallel::bm25_accumulate(terms, norm, scores);
  return scores;
}

RankedList Bm25Index::top_k(std::string_view query, std::size_t k, const Bm25Params& params,
                            std::string query_id) const {
  RankedList result{std::move(query_id), {}};
  if (k == 0) {
    params.validate();
    return result;
  }
  const auto scores = score_all(query, params);
  result.entries = select_top_k(scores, doc_ids_, k);
  return result;
}

std::vector<ScoredDoc> select_top_k(std::span<const double> scores,
                                    const std::vector<std::string>& ids, std::size_t k) {
  std::vector<std::uint32_t> hits;
  for (std::uint32_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > 0.0) hits.push_back(i);
  }
  // Ordinals follow id order, so ordinal comparison is the id tie-break.
  const auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    better);
  std::vector<ScoredDoc> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back({ids[hits[i]], scores[hits[i]]});
  return out;
}

void Bm25Index::save(const std::filesystem::path& path) const {
  Json lengths = Json::object();
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) lengths[doc_ids_[i]] = doc_lengths_[i];
  Json postings = Json::object();
  for (const auto& [term, list] : postings_) {
    Json arr = Json::array();
    for (const auto& p : list) arr.push_back(Json::array({doc_ids_[p.doc], p.tf}));
    postings[term] = std::move(arr);
  }
  const Json doc{{"version", kFormatVersion},
                 {"tokenizer_config", config_to_json(tokenizer_.config())},
                 {"doc_count", doc_ids_.size()},
                 {"avg_doc_length", avg_doc_length_},
                 {"doc_lengths", std::move(lengths)},
                 {"postings", std::move(postings)}};
  auto out = jsonl::open_output(path);
  out << doc.dump(1) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index file: " + path.string());
  const auto fail = [&](const std::string& msg) {
    return DataError(path.string() + ": " + msg);
  };

  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw fail(std::string("malformed JSON: ") + e.what());
  }

  try {
    if (doc.at("version").get<int>() != kFormatVersion) throw fail("unsupported index version");
    Bm25Index index{Tokenizer(config_from_json(doc.at("tokenizer_config")))};

    // nlohmann objects iterate in key order, which is the ordinal order.
    for (const auto& [id, length] : doc.at("doc_lengths").items()) {
      index.doc_ids_.push_back(id);
      index.doc_lengths_.push_back(length.get<std::uint32_t>());
    }
    index.finalize();
    if (doc.at("doc_count").get<std::size_t>() != index.doc_count()) {
      throw fail("doc_count does not match doc_lengths");
    }
    const double stored_avg = doc.at("avg_doc_length").get<double>();
    if (std::abs(stored_avg - index.avg_doc_length_) > 1e-9 * std::max(1.0, stored_avg)) {
      throw fail("avg_doc_length does not match doc_lengths");
    }

    for (const auto& [term, list] : doc.at("postings").items()) {
      std::vector<Posting> postings;
      for (const auto& entry : list) {
        const auto id = entry.at(0).get<std::string>();
        const auto tf = entry.at(1).get<std::uint32_t>();
        const auto ordinal = index.find_doc(id);
        if (!ordinal) throw fail("posting for '" + term + "' references unknown doc '" + id + "'");
        if (tf < 1 || tf > index.doc_lengths_[*ordinal]) {
          throw fail("invalid term frequency for '" + term + "' in doc '" + id + "'");
        }
        postings.push_back({*ordinal, tf});
      }
      std::sort(postings.begin(), postings.end(),
                [](const Posting& a, const Posting& b) { return a.doc < b.doc; });
      for (std::size_t i = 1; i < postings.size(); ++i) {
        if (postings[i].doc == postings[i - 1].doc) throw fail("duplicate posting for '" + term + "'");
      }
      if (!postings.empty()) index.postings_.emplace(term, std::move(postings));
    }
    if (index.postings_.empty()) throw fail("index has no postings");
    return index;
  } catch (const Json::exception& e) {
    throw fail(std::string("invalid index structure: ") + e.what());
  } catch (const UsageError& e) {
    throw fail(std::string("invalid tokenizer config: ") + e.what());
  }
}

}  // namespace faqir
