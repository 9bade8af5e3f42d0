#include "faqir/augmentation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "faqir/error.hpp"
#include "faqir/jsonl.hpp"
#include "faqir/random.hpp"
#include "faqir/text.hpp"

namespace faqir {

namespace {

struct WordSlot {
  std::size_t core_begin;  // byte offsets into the question
  std::size_t core_end;
  const std::vector<std::string>* synonyms;
};

// Byte range of a word with leading and trailing non-word characters removed.
std::pair<std::size_t, std::size_t> word_core(std::string_view word) {
  std::size_t begin = std::string_view::npos;
  std::size_t end = 0;
  for (std::size_t pos = 0; pos < word.size();) {
    const std::size_t at = pos;
    if (text::is_word_char(text::decode_next(word, pos))) {
      if (begin == std::string_view::npos) begin = at;
      end = pos;
    }
  }
  if (begin == std::string_view::npos) return {0, 0};
  return {begin, end};
}

std::string capitalize_first(std::string_view s) {
  if (s.empty()) return {};
  std::size_t pos = 0;
  const char32_t first = text::decode_next(s, pos);
  std::string out;
  text::append_utf8(out, text::to_upper(first));
  out.append(s.substr(pos));
  return out;
}

bool starts_upper(std::string_view s) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  return text::is_upper(text::decode_next(s, pos));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void SynonymLexicon::add(std::string_view word, std::span<const std::string> synonyms) {
  const std::string key = text::casefold(word);
  if (key.empty()) throw DataError("lexicon entry with empty word");
  auto& list = entries[key];
  for (const auto& raw : synonyms) {
    const auto syn = text::trim(raw);
    if (syn.empty()) continue;
    for (std::size_t pos = 0; pos < syn.size();) {
      if (text::is_space(text::decode_next(syn, pos))) {
        throw DataError("synonym '" + std::string(syn) + "' for '" + key +
                        "' spans more than one word");
      }
    }
    if (text::casefold(syn) == key) continue;
    if (std::find(list.begin(), list.end(), syn) == list.end()) list.emplace_back(syn);
  }
  if (list.empty()) entries.erase(key);
}

SynonymLexicon load_lexicon(const std::filesystem::path& path,
                            const std::set<std::string>& stopwords) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path.string());
  SynonymLexicon lexicon;
  for (const auto& w : stopwords) lexicon.stopwords.insert(text::casefold(w));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected word<TAB>synonyms");
    }
    std::vector<std::string> synonyms;
    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (true) {
      const auto comma = rest.find(',');
      synonyms.emplace_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    try {
      lexicon.add(std::string_view(line).substr(0, tab), synonyms);
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lexicon;
}

std::string_view bucket_name(Bucket b) {
  switch (b) {
    case Bucket::kSynonym: return "SYNONYM";
    case Bucket::kMaxSim: return "MAX_SIM";
    case Bucket::kMinSim: return "MIN_SIM";
  }
  return "SYNONYM";
}

Bucket parse_bucket(std::string_view name) {
  if (name == "SYNONYM") return Bucket::kSynonym;
  if (name == "MAX_SIM") return Bucket::kMaxSim;
  if (name == "MIN_SIM") return Bucket::kMinSim;
  throw DataError("unknown bucket '" + std::string(name) + "'");
}

std::optional<std::string> synonym_augment(std::string_view question,
                                           const SynonymLexicon& lexicon, std::uint64_t seed) {
  std::vector<WordSlot> slots;
  for (const auto word : text::split_whitespace(question)) {
    const auto [b, e] = word_core(word);
    if (b >= e) continue;
    const std::string key = text::lower(word.substr(b, e - b));
    if (lexicon.stopwords.contains(key)) continue;
    const auto it = lexicon.entries.find(key);
    if (it == lexicon.entries.end() || it->second.empty()) continue;
    const auto offset = static_cast<std::size_t>(word.data() - question.data());
    slots.push_back({offset + b, offset + e, &it->second});
  }
  if (slots.empty()) return std::nullopt;

  Rng rng(seed);
  const auto& slot = slots[uniform_index(rng, slots.size())];
  const auto& synonym = (*slot.synonyms)[uniform_index(rng, slot.synonyms->size())];
  const auto core = question.substr(slot.core_begin, slot.core_end - slot.core_begin);

  std::string out(question.substr(0, slot.core_begin));
  out += starts_upper(core) ? capitalize_first(synonym) : synonym;
  out.append(question.substr(slot.core_end));
  return out;
}

SynonymRun synonym_augment_corpus(const Corpus& corpus, const SynonymLexicon& lexicon,
                                  std::uint64_t seed) {
  SynonymRun run;
  for (const auto& r : corpus) {
    auto text = synonym_augment(r.question, lexicon, mix_seed(seed, r.id));
    if (text && *text != r.question) {
      run.pairs.push_back({r.id, std::move(*text), std::nullopt, Bucket::kSynonym});
    } else {
      run.skipped_ids.push_back(r.id);
    }
  }
  return run;
}

void assign_candidate_ids(std::vector<Candidate>& candidates) {
  std::unordered_map<std::string, std::size_t> ordinal;
  for (auto& c : candidates) {
    const std::size_t k = ordinal[c.original_id]++;
    if (c.id.empty()) c.id = c.original_id + "#" + std::to_string(k);
  }
}

std::vector<Candidate> load_candidates(const std::filesystem::path& path) {
  std::vector<Candidate> out;
  jsonl::for_each(path, [&](const jsonl::Json& obj, std::size_t line) {
    Candidate c;
    c.original_id = jsonl::require_string(obj, "original_id", line);
    c.text = jsonl::require_string(obj, "text", line);
    if (obj.contains("id")) c.id = jsonl::require_string(obj, "id", line);
    out.push_back(std::move(c));
  });
  assign_candidate_ids(out);
  std::unordered_set<std::string> seen;
  for (const auto& c : out) {
    if (!seen.insert(c.id).second) {
      throw DataError(path.string() + ": duplicate candidate id '" + c.id + "'");
    }
  }
  return out;
}

void write_candidates(const std::filesystem::path& path, std::span<const Candidate> candidates) {
  auto out = jsonl::open_output(path);
  for (const auto& c : candidates) {
    jsonl::write_line(out, {{"original_id", c.original_id}, {"text", c.text}, {"id", c.id}});
  }
  if (!out) throw DataError("failed writing " + path.string());
}

std::vector<Candidate> dedup_candidates(std::span<const Candidate> candidates,
                                        const std::map<std::string, std::string>* originals) {
  std::unordered_map<std::string, std::unordered_set<std::string>> seen;
  std::vector<Candidate> out;
  for (const auto& c : candidates) {
    const std::string key = text::casefold(c.text);
    if (key.empty()) continue;
    if (originals != nullptr) {
      const auto it = originals->find(c.original_id);
      if (it != originals->end() && text::casefold(it->second) == key) continue;
    }
    if (seen[c.original_id].insert(key).second) out.push_back(c);
  }
  return out;
}

ExpansionReport expansion_report(std::span<const Candidate> candidates) {
  std::map<std::string, std::size_t> per_original;
  for (const auto& c : candidates) ++per_original[c.original_id];
  ExpansionReport r;
  r.originals = per_original.size();
  r.candidates = candidates.size();
  if (r.originals == 0) return r;
  r.expansion_factor = static_cast<double>(r.candidates) / static_cast<double>(r.originals);
  r.min_per_original = r.max_per_original = per_original.begin()->second;
  for (const auto& [id, n] : per_original) {
    r.min_per_original = std::min(r.min_per_original, n);
    r.max_per_original = std::max(r.max_per_original, n);
  }
  return r;
}

Buckets bucketize(const SentenceVectorStore& original_vectors,
                  std::span<const Candidate> candidates,
                  const SentenceVectorStore& candidate_vectors) {
  std::unordered_map<std::string, std::size_t> original_index;
  for (std::size_t i = 0; i < original_vectors.size(); ++i) {
    original_index.emplace(original_vectors.ids()[i], i);
  }
  std::vector<std::vector<const Candidate*>> groups(original_vectors.size());
  for (const auto& c : candidates) {
    const auto it = original_index.find(c.original_id);
    if (it == original_index.end()) {
      throw DataError("candidate '" + c.id + "' refers to original '" + c.original_id +
                      "' which has no vector");
    }
    if (!candidate_vectors.contains(c.id)) {
      throw DataError("no vector for candidate '" + c.id + "'");
    }
    groups[it->second].push_back(&c);
  }
  std::string missing;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) missing += (missing.empty() ? "" : ", ") + original_vectors.ids()[i];
  }
  if (!missing.empty()) throw DataError("originals without candidates: " + missing);

  const auto n = static_cast<std::ptrdiff_t>(groups.size());
  Buckets out;
  out.max_set.resize(groups.size());
  out.min_set.resize(groups.size());
  std::vector<std::string> errors(groups.size());
  // Each original is handled independently and writes only its own slot.
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto original = original_vectors.vector_at(static_cast<std::size_t>(i));
      const Candidate* best = nullptr;
      const Candidate* worst = nullptr;
      double best_sim = 0.0, worst_sim = 0.0;
      for (const Candidate* c : groups[i]) {
        const double sim = cosine(original, candidate_vectors.vector(c->id));
        if (best == nullptr || sim > best_sim) {
          best = c;
          best_sim = sim;
        }
        if (worst == nullptr || sim < worst_sim) {
          worst = c;
          worst_sim = sim;
        }
      }
      out.max_set[i] = {best->original_id, best->text, best_sim, Bucket::kMaxSim};
      out.min_set[i] = {worst->original_id, worst->text, worst_sim, Bucket::kMinSim};
    } catch (const DataError& e) {
      errors[i] = original_vectors.ids()[i] + ": " + e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw DataError(e);
  }
  return out;
}

SimilarityRange similarity_range(std::span<const AugmentedPair> pairs) {
  SimilarityRange r;
  for (const auto& p : pairs) {
    if (!p.similarity) continue;
    if (r.count == 0) {
      r.min = r.max = *p.similarity;
    } else {
      r.min = std::min(r.min, *p.similarity);
      r.max = std::max(r.max, *p.similarity);
    }
    ++r.count;
  }
  return r;
}

std::vector<AugmentedPair> filter_by_similarity(std::span<const AugmentedPair> pairs, double low,
                                                double high) {
  std::vector<AugmentedPair> out;
  for (const auto& p : pairs) {
    if (p.similarity && *p.similarity >= low && *p.similarity <= high) out.push_back(p);
  }
  return out;
}

Histogram similarity_histogram(std::span<const AugmentedPair> pairs, std::size_t bins,
                               double low, double high) {
  if (bins < 1) throw UsageError("histogram needs at least one bin");
  if (!(low < high)) throw UsageError("histogram range must satisfy low < high");
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (high - low) / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) h.edges[i] = low + static_cast<double>(i) * width;
  h.edges[bins] = high;
  h.counts.assign(bins, 0);

  for (const auto& p : pairs) {
    if (!p.similarity) {
      throw DataError("pair for '" + p.original_id + "' has no similarity to bin");
    }
    const double x = *p.similarity;
    if (x < low || x > high) {
      ++h.out_of_range;
      continue;
    }
    auto bin = static_cast<std::size_t>(
        std::upper_bound(h.edges.begin(), h.edges.end(), x) - h.edges.begin());
    bin = std::min(bin, bins) - 1;
    ++h.counts[bin];
  }
  return h;
}

std::vector<AugmentedPair> load_pairs(const std::filesystem::path& path) {
  std::vector<AugmentedPair> out;
  jsonl::for_each(path, [&](const jsonl::Json& obj, std::size_t line) {
    AugmentedPair p;
    p.original_id = jsonl::require_string(obj, "original_id", line);
    p.text = jsonl::require_string(obj, "text", line);
    p.bucket = parse_bucket(jsonl::require_string(obj, "bucket", line));
    if (const auto it = obj.find("similarity"); it != obj.end() && !it->is_null()) {
      const double s = jsonl::require_finite(*it, "similarity", line);
      if (s < -1.0 || s > 1.0) {
        throw DataError("line " + std::to_string(line) + ": similarity outside [-1, 1]");
      }
      p.similarity = s;
    }
    if (p.bucket != Bucket::kSynonym && !p.similarity) {
      throw DataError("line " + std::to_string(line) + ": similarity required for " +
                      std::string(bucket_name(p.bucket)));
    }
    out.push_back(std::move(p));
  });
  return out;
}

void write_pairs(const std::filesystem::path& path, std::span<const AugmentedPair> pairs) {
  auto out = jsonl::open_output(path);
  for (const auto& p : pairs) {
    jsonl::Json obj{{"original_id", p.original_id},
                    {"text", p.text},
                    {"bucket", bucket_name(p.bucket)}};
    obj["similarity"] = p.similarity ? jsonl::Json(*p.similarity) : jsonl::Json(nullptr);
    jsonl::write_line(out, obj);
  }
  if (!out) throw DataError("failed writing " + path.string());
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& histogram) {
  auto out = jsonl::open_output(path);
  out << "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
    out << format_double(histogram.edges[i]) << ',' << format_double(histogram.edges[i + 1])
        << ',' << histogram.counts[i] << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace faqir
