#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/embedding.hpp"

namespace faqir {

// Keys and stopwords are stored lowercased. No key maps to itself and no
// synonym contains whitespace, so a substitution always changes exactly one
// whitespace-delimited word.
struct SynonymLexicon {
  std::map<std::string, std::vector<std::string>> entries;
  std::set<std::string> stopwords;

  // Normalizes keys, drops self-synonyms and empty lists; DataError for
  // synonyms containing whitespace.
  void add(std::string_view word, std::span<const std::string> synonyms);
};

// TSV: word<TAB>syn1,syn2,...  Lines starting with '#' are comments.
SynonymLexicon load_lexicon(const std::filesystem::path& path,
                            const std::set<std::string>& stopwords = {});

enum class Bucket { kSynonym, kMaxSim, kMinSim };

std::string_view bucket_name(Bucket b);
Bucket parse_bucket(std::string_view name);

struct AugmentedPair {
  std::string original_id;
  std::string text;
  std::optional<double> similarity;
  Bucket bucket = Bucket::kSynonym;

  bool operator==(const AugmentedPair&) const = default;
};

// Replaces one non-stopword word that has lexicon synonyms. The word and the
// synonym are both drawn from std::mt19937_64(seed). Surrounding punctuation
// and the capitalization of the first letter are preserved. Returns nullopt
// when no word of the question has a lexicon entry.
std::optional<std::string> synonym_augment(std::string_view question,
                                           const SynonymLexicon& lexicon, std::uint64_t seed);

struct SynonymRun {
  std::vector<AugmentedPair> pairs;
  std::vector<std::string> skipped_ids;  // not augmentable
};

// Per-record seeds are mix_seed(seed, record id), so a record's output does
// not depend on its position in the corpus.
SynonymRun synonym_augment_corpus(const Corpus& corpus, const SynonymLexicon& lexicon,
                                  std::uint64_t seed);

// A paraphrase candidate for one original question. `id` keys the
// candidate's vector; when absent from the file it is "<original_id>#<k>"
// with k the candidate's 0-based position among that original's candidates.
struct Candidate {
  std::string original_id;
  std::string text;
  std::string id;

  bool operator==(const Candidate&) const = default;
};

std::vector<Candidate> load_candidates(const std::filesystem::path& path);
void write_candidates(const std::filesystem::path& path, std::span<const Candidate> candidates);
void assign_candidate_ids(std::vector<Candidate>& candidates);

// Drops candidates whose trimmed, case-folded text repeats an earlier one for
// the same original, or matches the original question when `originals`
// (original id -> question) is given. Empty texts are dropped too. First
// occurrences keep their order.
std::vector<Candidate> dedup_candidates(std::span<const Candidate> candidates,
                                        const std::map<std::string, std::string>* originals = nullptr);

struct ExpansionReport {
  std::size_t originals = 0;
  std::size_t candidates = 0;
  double expansion_factor = 0.0;  // candidates / originals
  std::size_t min_per_original = 0;
  std::size_t max_per_original = 0;
};

ExpansionReport expansion_report(std::span<const Candidate> candidates);

struct Buckets {
  std::vector<AugmentedPair> max_set;
  std::vector<AugmentedPair> min_set;
};

// For every original in `original_vectors` (store order) picks the most and
// least cosine-similar candidate; ties go to the earlier candidate.
Buckets bucketize(const SentenceVectorStore& original_vectors,
                  std::span<const Candidate> candidates,
                  const SentenceVectorStore& candidate_vectors);

struct SimilarityRange {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

// Range over pairs with a similarity; count = 0 when none has one.
SimilarityRange similarity_range(std::span<const AugmentedPair> pairs);

// Keeps pairs whose similarity lies in [low, high].
std::vector<AugmentedPair> filter_by_similarity(std::span<const AugmentedPair> pairs, double low,
                                                double high);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t out_of_range = 0;
};

// Uniform bins over [low, high]. A value on an inner edge falls in the upper
// bin; the last bin is closed. Values outside [low, high] are counted in
// out_of_range only.
Histogram similarity_histogram(std::span<const AugmentedPair> pairs, std::size_t bins,
                               double low, double high);

std::vector<AugmentedPair> load_pairs(const std::filesystem::path& path);
void write_pairs(const std::filesystem::path& path, std::span<const AugmentedPair> pairs);
// CSV with header bin_low,bin_high,count.
void write_histogram_csv(const std::filesystem::path& path, const Histogram& histogram);

}  // namespace faqir
