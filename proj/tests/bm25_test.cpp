#include "faqir/bm25.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <map>
#include <random>

#include "faqir/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace faqir {
namespace {

using PostingMap = std::map<std::string, std::vector<std::pair<std::string, std::uint32_t>>>;

PostingMap postings_by_id(const Bm25Index& index) {
  PostingMap out;
  for (const auto& [term, list] : index.postings()) {
    for (const auto& p : list) out[term].emplace_back(index.doc_ids()[p.doc], p.tf);
  }
  return out;
}

// Random corpora over a small ASCII vocabulary, so splitting on spaces is
// exactly what the tokenizer does.
struct RandomCase {
  std::vector<Document> docs;
  std::vector<oracle::RawDoc> raw;
};

RandomCase random_case(std::mt19937_64& rng, std::size_t n_docs) {
  static const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f", "g", "h",
                                                 "i", "j", "k", "l", "m", "n", "o", "p"};
  RandomCase c;
  for (std::size_t i = 0; i < n_docs; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "d%02zu", i);
    oracle::RawDoc raw{id, {}};
    std::string text;
    const std::size_t len = 1 + rng() % 12;
    for (std::size_t t = 0; t < len; ++t) {
      raw.tokens.push_back(vocab[rng() % vocab.size()]);
      text += (t ? " " : "") + raw.tokens.back();
    }
    c.docs.push_back({id, text});
    c.raw.push_back(std::move(raw));
  }
  return c;
}

std::vector<std::string> random_query(std::mt19937_64& rng) {
  static const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f", "g", "h",
                                                 "i", "j", "k", "l", "m", "n", "o", "p", "zz"};
  std::vector<std::string> q(1 + rng() % 8);
  for (auto& t : q) t = vocab[rng() % vocab.size()];
  return q;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string s;
  for (const auto& t : tokens) s += (s.empty() ? "" : " ") + t;
  return s;
}

TEST(Bm25Build, TwoDocPostings) {
  const std::vector<Document> docs = {{"d1", "a b"}, {"d2", "b c"}};
  const auto index = Bm25Index::build(docs);
  EXPECT_EQ(index.doc_count(), 2u);
  EXPECT_DOUBLE_EQ(index.avg_doc_length(), 2.0);
  EXPECT_EQ(postings_by_id(index),
            (PostingMap{{"a", {{"d1", 1}}}, {"b", {{"d1", 1}, {"d2", 1}}}, {"c", {{"d2", 1}}}}));
}

TEST(Bm25Build, RepeatedToken) {
  const std::vector<Document> docs = {{"d1", "x x x"}};
  const auto index = Bm25Index::build(docs);
  EXPECT_EQ(postings_by_id(index), (PostingMap{{"x", {{"d1", 3}}}}));
  EXPECT_EQ(index.doc_lengths(), (std::vector<std::uint32_t>{3}));
}

TEST(Bm25Build, PortugueseFixtureMatchesHandBuiltPostings) {
  const std::vector<Document> docs = {{"p1", "Como faço um PIX?"},
                                      {"p2", "O PIX é gratuito."},
                                      {"p3", "Faço a declaração do imposto"},
                                      {"p4", "Consórcio é compra em grupo"},
                                      {"p5", "PIX, PIX e mais PIX"}};
  const PostingMap expected = {
      {"como", {{"p1", 1}}},
      {"faço", {{"p1", 1}, {"p3", 1}}},
      {"um", {{"p1", 1}}},
      {"pix", {{"p1", 1}, {"p2", 1}, {"p5", 3}}},
      {"o", {{"p2", 1}}},
      {"é", {{"p2", 1}, {"p4", 1}}},
      {"gratuito", {{"p2", 1}}},
      {"a", {{"p3", 1}}},
      {"declaração", {{"p3", 1}}},
      {"do", {{"p3", 1}}},
      {"imposto", {{"p3", 1}}},
      {"consórcio", {{"p4", 1}}},
      {"compra", {{"p4", 1}}},
      {"em", {{"p4", 1}}},
      {"grupo", {{"p4", 1}}},
      {"e", {{"p5", 1}}},
      {"mais", {{"p5", 1}}},
  };
  const auto index = Bm25Index::build(docs);
  EXPECT_EQ(postings_by_id(index), expected);
  EXPECT_EQ(index.doc_lengths(), (std::vector<std::uint32_t>{4, 4, 5, 5, 5}));
  EXPECT_DOUBLE_EQ(index.avg_doc_length(), 23.0 / 5.0);
}

TEST(Bm25Build, Errors) {
  const std::vector<Document> dup = {{"d1", "a"}, {"d1", "b"}};
  EXPECT_THROW(Bm25Index::build(dup), DataError);
  const std::vector<Document> empty = {{"d1", "?!"}, {"d2", "  "}};
  EXPECT_THROW(Bm25Index::build(empty), DataError);
}

TEST(Bm25Build, EmptyDocumentsCountTowardN) {
  const std::vector<Document> docs = {{"d1", "a"}, {"d2", "..."}, {"d3", "b"}};
  const auto index = Bm25Index::build(docs);
  EXPECT_EQ(index.doc_count(), 3u);
  EXPECT_DOUBLE_EQ(index.idf("a"), std::log(4.0));
}

TEST(Bm25Idf, Examples) {
  const std::vector<Document> four = {{"1", "t x"}, {"2", "t"}, {"3", "t y"}, {"4", "t"}};
  EXPECT_NEAR(Bm25Index::build(four).idf("t"), 0.22314355131420976, 1e-12);
  const std::vector<Document> three = {{"1", "t"}, {"2", "u"}, {"3", "v"}};
  const auto index = Bm25Index::build(three);
  EXPECT_NEAR(index.idf("t"), 1.3862943611198906, 1e-12);
  EXPECT_EQ(index.idf("unseen"), 0.0);
}

TEST(Bm25Score, NoOverlapIsZero) {
  const std::vector<Document> docs = {{"d1", "a b"}, {"d2", "c"}};
  EXPECT_EQ(Bm25Index::build(docs).score("c", "d1"), 0.0);
}

TEST(Bm25Score, SingleDocHandValue) {
  const std::vector<Document> docs = {{"d1", "a"}};
  EXPECT_NEAR(Bm25Index::build(docs).score("a", "d1"), 2.0 * std::log(2.0), 1e-12);
}

TEST(Bm25Score, RepeatedQueryTermsCountPerOccurrence) {
  const std::vector<Document> docs = {{"d1", "a b"}, {"d2", "b c"}};
  const auto index = Bm25Index::build(docs);
  EXPECT_NEAR(index.score("a a", "d1"), 2.0 * index.score("a", "d1"), 1e-12);
}

TEST(Bm25Score, UnknownDocIsDataError) {
  const std::vector<Document> docs = {{"d1", "a"}};
  EXPECT_THROW(Bm25Index::build(docs).score("a", "nope"), DataError);
}

TEST(Bm25Score, ZeroDeltaIsClassicBm25) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = random_case(rng, 10);
    const auto index = Bm25Index::build(c.docs);
    const auto query = random_query(rng);
    for (std::size_t d = 0; d < c.docs.size(); ++d) {
      EXPECT_NEAR(index.score(join(query), c.docs[d].id, {1.2, 0.75, 0.0}),
                  oracle::bm25_classic(c.raw, query, d, 1.2, 0.75), 1e-9);
    }
  }
}

TEST(Bm25Params, Validation) {
  EXPECT_NO_THROW(Bm25Params{}.validate());
  EXPECT_THROW((Bm25Params{0.0, 0.75, 1.0}.validate()), UsageError);
  EXPECT_THROW((Bm25Params{1.2, 1.5, 1.0}.validate()), UsageError);
  EXPECT_THROW((Bm25Params{1.2, 0.75, -1.0}.validate()), UsageError);
  EXPECT_THROW((Bm25Params{NAN, 0.75, 1.0}.validate()), UsageError);
}

TEST(Bm25TopK, Boundaries) {
  const std::vector<Document> docs = {{"d1", "a b"}, {"d2", "b c"}, {"d3", "c"}};
  const auto index = Bm25Index::build(docs);
  EXPECT_TRUE(index.top_k("b", 0).entries.empty());
  const auto all = index.top_k("b c", 100);
  EXPECT_EQ(all.ids(), (std::vector<std::string>{"d2", "d3", "d1"}));
  EXPECT_TRUE(index.top_k("zzz", 10).entries.empty());
}

TEST(Bm25TopK, TiesBrokenByAscendingId) {
  const std::vector<Document> docs = {{"c", "x"}, {"a", "x"}, {"b", "x"}};
  EXPECT_EQ(Bm25Index::build(docs).top_k("x", 3).ids(), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Bm25TopK, MatchesBruteForceOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_case(rng, 20);
    const auto index = Bm25Index::build(c.docs);
    const Bm25Params params{0.5 + (rng() % 100) / 50.0, (rng() % 101) / 100.0,
                            (rng() % 30) / 10.0};
    for (int q = 0; q < 5; ++q) {
      const auto query = random_query(rng);
      const std::size_t k = rng() % 25;
      const auto got = index.top_k(join(query), k, params).entries;
      const auto want = oracle::brute_top_k(c.raw, query, k, params.k1, params.b, params.delta);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].id, want[i].first);
        EXPECT_NEAR(got[i].score, want[i].second, 1e-9);
      }
    }
  }
}

TEST(Bm25Properties, PrefixDeltaMonotoneNonNegative) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_case(rng, 15);
    const auto index = Bm25Index::build(c.docs);
    const auto query = join(random_query(rng));
    const auto full = index.top_k(query, 15).ids();
    for (std::size_t k = 0; k <= 15; ++k) {
      auto prefix = full;
      prefix.resize(std::min(k, full.size()));
      EXPECT_EQ(index.top_k(query, k).ids(), prefix);
    }
    for (const auto& d : c.docs) {
      double previous = -1;
      for (double delta : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const double s = index.score(query, d.id, {1.2, 0.75, delta});
        EXPECT_GE(s, 0.0);
        EXPECT_GE(s, previous);
        previous = s;
      }
    }
  }
}

// N and avgdl both change when a document is added, so rank order is only
// guaranteed when they cannot reweight docs against each other: a single
// query term (idf is a common factor) and no length normalization.
TEST(Bm25Properties, UnrelatedDocKeepsRankOrder) {
  std::mt19937_64 rng(41);
  const Bm25Params no_length_norm{1.2, 0.0, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_case(rng, 12);
    const auto query = random_query(rng)[0];
    const auto before = Bm25Index::build(c.docs).top_k(query, 100, no_length_norm).ids();
    c.docs.push_back({"zz_unrelated", "qqq rrr sss"});
    const auto after = Bm25Index::build(c.docs).top_k(query, 100, no_length_norm).ids();
    EXPECT_EQ(before, after);
  }
}

TEST(Bm25Properties, UnrelatedDocCanReorderInGeneral) {
  // d1 matches the rarer term once, d2 the commoner term five times. Growing
  // N raises the commoner term's idf proportionally more.
  std::vector<Document> docs = {{"d1", "r x"}, {"d2", "c c c c c"}, {"d3", "c y"}, {"d4", "c z"}};
  const Bm25Params params{1.2, 0.0, 1.0};
  const auto before = Bm25Index::build(docs).top_k("r c", 2, params);
  for (int i = 0; i < 96; ++i) docs.push_back({"u" + std::to_string(100 + i), "w"});
  const auto after = Bm25Index::build(docs).top_k("r c", 2, params);
  EXPECT_EQ(before.ids(), (std::vector<std::string>{"d1", "d2"}));
  EXPECT_EQ(after.ids(), (std::vector<std::string>{"d2", "d1"}));
}

TEST(Bm25Properties, ScoreAllAgreesWithScore) {
  std::mt19937_64 rng(51);
  const auto c = random_case(rng, 30);
  const auto index = Bm25Index::build(c.docs);
  const auto query = join(random_query(rng));
  const auto dense = index.score_all(query);
  for (std::size_t i = 0; i < index.doc_count(); ++i) {
    EXPECT_NEAR(dense[i], index.score(query, index.doc_ids()[i]), 1e-12);
  }
}

TEST(Bm25Persistence, RoundTrip) {
  testing::TempDir dir;
  std::mt19937_64 rng(61);
  const auto c = random_case(rng, 25);
  TokenizerConfig config;
  config.stopwords = {"a", "b"};
  const auto index = Bm25Index::build(c.docs, config);
  index.save(dir / "idx.json");
  const auto loaded = Bm25Index::load(dir / "idx.json");
  EXPECT_EQ(postings_by_id(loaded), postings_by_id(index));
  EXPECT_EQ(loaded.doc_ids(), index.doc_ids());
  EXPECT_EQ(loaded.doc_lengths(), index.doc_lengths());
  EXPECT_EQ(loaded.avg_doc_length(), index.avg_doc_length());
  EXPECT_EQ(loaded.tokenizer_config(), config);
  for (int q = 0; q < 10; ++q) {
    const auto query = join(random_query(rng));
    EXPECT_EQ(loaded.top_k(query, 10), index.top_k(query, 10));
  }
}

TEST(Bm25Persistence, RejectsBrokenFiles) {
  testing::TempDir dir;
  EXPECT_THROW(Bm25Index::load(dir / "missing.json"), DataError);
  testing::write_file(dir / "garbage.json", "{not json");
  EXPECT_THROW(Bm25Index::load(dir / "garbage.json"), DataError);
  const std::vector<Document> docs = {{"d1", "a b"}};
  Bm25Index::build(docs).save(dir / "ok.json");
  auto doc = nlohmann::json::parse(testing::read_file(dir / "ok.json"));
  doc["version"] = 9;
  testing::write_file(dir / "v9.json", doc.dump());
  EXPECT_THROW(Bm25Index::load(dir / "v9.json"), DataError);
  doc["version"] = 1;
  doc["tokenizer_config"]["min_token_length"] = 0;
  testing::write_file(dir / "bad_config.json", doc.dump());
  EXPECT_THROW(Bm25Index::load(dir / "bad_config.json"), DataError);
  doc["tokenizer_config"]["min_token_length"] = 1;
  doc["postings"]["a"][0][0] = "ghost";
  testing::write_file(dir / "ghost.json", doc.dump());
  EXPECT_THROW(Bm25Index::load(dir / "ghost.json"), DataError);
}

}  // namespace
}  // namespace faqir
