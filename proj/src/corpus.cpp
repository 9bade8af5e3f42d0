#include "faqir/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "faqir/error.hpp"
#include "faqir/jsonl.hpp"
#include "faqir/random.hpp"
#include "faqir/text.hpp"

namespace faqir {

namespace {

void validate_record(const FaqRecord& r, const std::string& where) {
  const auto check = [&](const std::string& value, const char* field) {
    if (text::trim(value).empty()) throw DataError(where + "empty " + field);
  };
  check(r.id, "id");
  check(r.question, "question");
  check(r.category, "category");
  check(r.answer, "answer");
}

std::string line_prefix(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

class CorpusBuilder {
 public:
  explicit CorpusBuilder(std::filesystem::path path) : path_(std::move(path)) {}

  void add(FaqRecord record, std::size_t line) {
    if (record.id.empty()) record.id = synthesized_id(records_.size());
    validate_record(record, line_prefix(path_, line));
    if (!seen_.insert(record.id).second) {
      throw DataError(line_prefix(path_, line) + "duplicate id '" + record.id + "'");
    }
    records_.push_back(std::move(record));
  }

  Corpus finish() {
    if (records_.empty()) throw DataError(path_.string() + ": corpus file is empty");
    return Corpus(std::move(records_));
  }

 private:
  std::filesystem::path path_;
  std::vector<FaqRecord> records_;
  std::unordered_set<std::string> seen_;
};

Corpus load_jsonl(const std::filesystem::path& path) {
  CorpusBuilder builder(path);
  jsonl::for_each(path, [&](const jsonl::Json& obj, std::size_t line) {
    FaqRecord r;
    if (const auto it = obj.find("id"); it != obj.end() && !it->is_null()) {
      if (it->is_string()) {
        r.id = it->get<std::string>();
      } else if (it->is_number_integer()) {
        r.id = std::to_string(it->get<long long>());
      } else {
        throw DataError("line " + std::to_string(line) + ": id must be a string");
      }
      if (r.id.empty()) throw DataError("line " + std::to_string(line) + ": empty id");
    }
    r.question = jsonl::require_string(obj, "question", line);
    r.category = jsonl::require_string(obj, "category", line);
    r.answer = jsonl::require_string(obj, "answer", line);
    builder.add(std::move(r), line);
  });
  return builder.finish();
}

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC 4180: quoted fields may contain delimiters, doubled quotes and newlines.
std::vector<CsvRow> parse_csv(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  std::size_t line = 1;
  row.line = 1;
  bool quoted = false;
  bool field_started = false;
  bool after_quote = false;

  const auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
    after_quote = false;
  };
  const auto end_row = [&] {
    end_field();
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row = CsvRow{};
    row.line = line;
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == delimiter) {
      end_field();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') ++i;
      ++line;
      end_row();
    } else if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else {
      if (after_quote) {
        throw DataError(line_prefix(path, line) + "unexpected character after closing quote");
      }
      if (c == '"') throw DataError(line_prefix(path, line) + "stray quote in unquoted field");
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw DataError(line_prefix(path, row.line) + "unterminated quoted field");
  if (field_started || !field.empty() || !row.fields.empty()) end_row();
  return rows;
}

Corpus load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  const auto rows = parse_csv(path, options.delimiter);
  if (rows.empty()) throw DataError(path.string() + ": corpus file is empty");

  const auto& header = rows.front().fields;
  const auto column = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
    if (name.empty()) {
      if (required) throw UsageError("column map has an empty name");
      return std::nullopt;
    }
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      if (required) throw DataError(path.string() + ": header lacks column '" + name + "'");
      return std::nullopt;
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto id_col = column(options.columns.id, false);
  const std::size_t q_col = *column(options.columns.question, true);
  const std::size_t c_col = *column(options.columns.category, true);
  const std::size_t a_col = *column(options.columns.answer, true);

  CorpusBuilder builder(path);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() != header.size()) {
      throw DataError(line_prefix(path, row.line) + "expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(row.fields.size()));
    }
    FaqRecord r;
    if (id_col) r.id = row.fields[*id_col];
    r.question = row.fields[q_col];
    r.category = row.fields[c_col];
    r.answer = row.fields[a_col];
    builder.add(std::move(r), row.line);
  }
  return builder.finish();
}

std::size_t count_words(const std::string& s, const StatsOptions& options,
                        const Tokenizer& tokenizer) {
  if (options.word_mode == WordCountMode::kTokenizer) return tokenizer.tokenize(s).size();
  return text::split_whitespace(text::trim(s)).size();
}

std::vector<std::size_t> top_counts(const std::map<std::string, std::size_t>& histogram,
                                    std::size_t k, const std::string* exclude) {
  std::vector<std::size_t> counts;
  counts.reserve(histogram.size());
  for (const auto& [category, count] : histogram) {
    if (exclude == nullptr || category != *exclude) counts.push_back(count);
  }
  std::sort(counts.begin(), counts.end(), std::greater<>());
  if (counts.size() > k) counts.resize(k);
  return counts;
}

}  // namespace

Corpus::Corpus(std::vector<FaqRecord> records) : records_(std::move(records)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    validate_record(records_[i], "record " + std::to_string(i) + ": ");
    if (!seen.insert(records_[i].id).second) {
      throw DataError("duplicate id '" + records_[i].id + "'");
    }
  }
}

std::string synthesized_id(std::size_t row) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", row);
  return buf;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
  return options.format == CorpusFormat::kCsv ? load_csv(path, options) : load_jsonl(path);
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  auto out = jsonl::open_output(path);
  for (const auto& r : corpus) {
    jsonl::Json obj;
    obj["id"] = r.id;
    obj["question"] = r.question;
    obj["category"] = r.category;
    obj["answer"] = r.answer;
    jsonl::write_line(out, obj);
  }
  if (!out) throw DataError("failed writing " + path.string());
}

CorpusStats compute_stats(const Corpus& corpus, const StatsOptions& options) {
  if (corpus.empty()) throw DataError("cannot compute statistics of an empty corpus");
  const Tokenizer tokenizer(options.tokenizer);

  CorpusStats stats;
  stats.record_count = corpus.size();
  std::size_t q_words = 0, c_words = 0, a_words = 0;
  std::set<std::string_view> questions, categories, answers;
  for (const auto& r : corpus) {
    const std::size_t qw = count_words(r.question, options, tokenizer);
    q_words += qw;
    c_words += count_words(r.category, options, tokenizer);
    a_words += count_words(r.answer, options, tokenizer);
    if (qw < 5) ++stats.short_questions;
    questions.insert(r.question);
    categories.insert(r.category);
    answers.insert(r.answer);
    ++stats.category_histogram[r.category];
  }
  const auto n = static_cast<double>(corpus.size());
  stats.question = {static_cast<double>(q_words) / n, questions.size()};
  stats.category = {static_cast<double>(c_words) / n, categories.size()};
  stats.answer = {static_cast<double>(a_words) / n, answers.size()};

  const std::string ood = kOutOfDomainCategory;
  if (const auto it = stats.category_histogram.find(ood); it != stats.category_histogram.end()) {
    stats.ood_count = it->second;
  }
  stats.categories_in_domain = stats.category_histogram.size() - (stats.ood_count > 0 ? 1 : 0);
  stats.top_counts = top_counts(stats.category_histogram, options.top_k, nullptr);
  stats.top_counts_in_domain = top_counts(stats.category_histogram, options.top_k, &ood);
  return stats;
}

std::size_t train_size(std::size_t n, double train_fraction) {
  // The small slack keeps products such as 0.7 * 100 = 70.00000000000001
  // from rounding up to 71.
  const double exact = static_cast<double>(n) * train_fraction;
  const auto size = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::min(size, n);
}

Split split_holdout(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw UsageError("train fraction must be in (0, 1]");
  }
  if (corpus.empty()) throw DataError("cannot split an empty corpus");

  const std::size_t n = corpus.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i + 1));
    std::swap(order[i], order[j]);
  }

  const std::size_t cut = train_size(n, train_fraction);
  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < cut; ++i) in_train[order[i]] = true;

  std::vector<FaqRecord> train, test;
  train.reserve(cut);
  test.reserve(n - cut);
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? train : test).push_back(corpus[i]);
  return {Corpus(std::move(train)), Corpus(std::move(test))};
}

Corpus filter_small_classes(const Corpus& corpus, std::size_t min_count) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& r : corpus) ++counts[r.category];
  std::vector<FaqRecord> kept;
  for (const auto& r : corpus) {
    if (counts[r.category] >= min_count) kept.push_back(r);
  }
  return Corpus(std::move(kept));
}

}  // namespace faqir
