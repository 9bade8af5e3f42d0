#include "faqir/evaluation.hpp"

#include <gtest/gtest.h>

#include <random>

#include "faqir/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace faqir {
namespace {

RankedList ranking(std::string qid, std::vector<std::string> ids) {
  RankedList r{std::move(qid), {}};
  double s = static_cast<double>(ids.size());
  for (auto& id : ids) r.entries.push_back({std::move(id), s--});
  return r;
}

TEST(Mrr, GoldAlwaysFirst) {
  const std::vector<RankedList> runs = {ranking("q1", {"a", "b"}), ranking("q2", {"c"})};
  EXPECT_EQ(mrr_at_k(runs, {{"q1", "a"}, {"q2", "c"}}, 5), 1.0);
}

TEST(Mrr, RanksOneTwoSix) {
  const std::vector<RankedList> runs = {
      ranking("q1", {"g", "x"}),
      ranking("q2", {"x", "g"}),
      ranking("q3", {"a", "b", "c", "d", "e", "g"}),
  };
  const GoldMapping gold = {{"q1", "g"}, {"q2", "g"}, {"q3", "g"}};
  EXPECT_DOUBLE_EQ(mrr_at_k(runs, gold, 5), 0.5);
  EXPECT_DOUBLE_EQ(mrr_at_k(runs, gold, 6), (1 + 0.5 + 1.0 / 6) / 3);
}

TEST(Mrr, Errors) {
  const std::vector<RankedList> runs = {ranking("q1", {"a"})};
  EXPECT_THROW(mrr_at_k(runs, {{"q2", "a"}}, 1), DataError);
  EXPECT_THROW(mrr_at_k(runs, {{"q1", "a"}}, 0), UsageError);
  EXPECT_THROW(mrr_at_k({}, {{"q1", "a"}}, 1), DataError);
}

TEST(MrrProperties, OracleAccuracyAndMonotone) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RankedList> runs;
    std::vector<std::pair<std::string, std::vector<std::string>>> raw;
    GoldMapping gold;
    const std::size_t nq = 1 + rng() % 15;
    for (std::size_t q = 0; q < nq; ++q) {
      std::vector<std::string> ids;
      for (int i = 0; i < 10; ++i) ids.push_back("d" + std::to_string(i));
      std::shuffle(ids.begin(), ids.end(), rng);
      ids.resize(rng() % 11);
      const auto qid = "q" + std::to_string(q);
      gold[qid] = "d" + std::to_string(rng() % 10);
      raw.emplace_back(qid, ids);
      runs.push_back(ranking(qid, ids));
    }
    double previous = 0;
    for (std::size_t k = 1; k <= 11; ++k) {
      const double m = mrr_at_k(runs, gold, k);
      EXPECT_NEAR(m, oracle::naive_mrr(raw, gold, k), 1e-12);
      EXPECT_GE(m, previous);
      EXPECT_LE(m, 1.0);
      previous = m;
    }
    std::size_t hits = 0;
    for (const auto& [qid, ids] : raw) hits += !ids.empty() && ids[0] == gold.at(qid) ? 1 : 0;
    EXPECT_DOUBLE_EQ(mrr_at_k(runs, gold, 1), static_cast<double>(hits) / static_cast<double>(nq));
  }
}

std::map<std::string, std::string> labels(const std::vector<std::string>& v) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out["i" + std::to_string(100 + i)] = v[i];
  return out;
}

TEST(F1, PerfectAndDisjoint) {
  const auto gold = labels({"A", "B", "B", "C"});
  for (auto avg : {F1Average::kMacro, F1Average::kMicro, F1Average::kWeighted}) {
    EXPECT_EQ(f1_report(gold, gold, avg), 1.0);
    EXPECT_EQ(f1_report(labels({"B", "C", "C", "A"}), gold, avg), 0.0);
  }
}

TEST(F1, TwoClassHandFixture) {
  const auto b = f1_breakdown(labels({"A", "B", "B"}), labels({"A", "A", "B"}));
  EXPECT_NEAR(b.per_class.at("A").f1, 2.0 / 3, 1e-12);
  EXPECT_NEAR(b.per_class.at("B").f1, 2.0 / 3, 1e-12);
  EXPECT_NEAR(b.macro, 2.0 / 3, 1e-12);
  EXPECT_EQ(b.per_class.at("A").support, 2u);
}

TEST(F1, MismatchedIdsAndParse) {
  EXPECT_THROW(f1_report(labels({"A"}), labels({"A", "B"})), DataError);
  EXPECT_EQ(parse_f1_average("weighted"), F1Average::kWeighted);
  EXPECT_THROW(parse_f1_average("harmonic"), UsageError);
}

TEST(F1Properties, MatchesConfusionMatrixOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    const std::size_t classes = 1 + rng() % 6;
    std::vector<std::string> g(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = "c" + std::to_string(rng() % classes);
      p[i] = rng() % 3 == 0 ? g[i] : "c" + std::to_string(rng() % (classes + 1));
    }
    const auto ref = oracle::confusion_f1(g, p);
    const auto b = f1_breakdown(labels(p), labels(g));
    EXPECT_NEAR(b.macro, ref.macro, 1e-12);
    EXPECT_NEAR(b.micro, ref.micro, 1e-12);
    EXPECT_NEAR(b.weighted, ref.weighted, 1e-12);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) correct += g[i] == p[i] ? 1 : 0;
    EXPECT_NEAR(b.micro, static_cast<double>(correct) / static_cast<double>(n), 1e-12);
  }
}

TEST(Semantic, SelfRetrievalScoresOne) {
  SentenceVectorStore q(2), t(2);
  q.add("q1", std::vector<double>{1, 0});
  q.add("q2", std::vector<double>{0, 1});
  t.add("t1", std::vector<double>{1, 0});
  t.add("t2", std::vector<double>{0, 1});
  const std::vector<std::size_t> ks = {1, 5};
  const auto rows = semantic_search_eval(q, t, {{"q1", "t1"}, {"q2", "t2"}}, ks, {"s", "d", "question"});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].value, 1.0);
  EXPECT_EQ(rows[1].value, 1.0);
  EXPECT_EQ(rows[1].k, 5u);
  EXPECT_EQ(rows[0].target, "question");
}

TEST(Semantic, ThreeTargetHandRanking) {
  // cosines of q=(1,0): t_a=(1,1) 0.707, t_b=(1,0) 1.0, t_c=(0,1) 0.0
  SentenceVectorStore q(2), t(2);
  q.add("q", std::vector<double>{1, 0});
  t.add("t_a", std::vector<double>{1, 1});
  t.add("t_b", std::vector<double>{1, 0});
  t.add("t_c", std::vector<double>{0, 1});
  const std::vector<std::size_t> ks = {1, 2, 3};
  const auto a = semantic_search_eval(q, t, {{"q", "t_a"}}, ks);
  EXPECT_EQ(a[0].value, 0.0);
  EXPECT_EQ(a[1].value, 0.5);
  const auto c = semantic_search_eval(q, t, {{"q", "t_c"}}, ks);
  EXPECT_NEAR(c[2].value, 1.0 / 3, 1e-15);
}

TEST(SemanticProperties, MonotoneInKAndScaleInvariant) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 3;
    SentenceVectorStore q(dim), t(dim), t_scaled(dim);
    GoldMapping gold;
    for (int i = 0; i < 12; ++i) {
      std::vector<double> v = {dist(rng), dist(rng), dist(rng) + 2};
      const auto id = "t" + std::to_string(i);
      t.add(id, v);
      const double alpha = i == 3 ? 17.5 : 1.0;
      for (auto& x : v) x *= alpha;
      t_scaled.add(id, v);
    }
    for (int i = 0; i < 8; ++i) {
      q.add("q" + std::to_string(i), std::vector<double>{dist(rng), dist(rng), dist(rng) + 2});
      gold["q" + std::to_string(i)] = "t" + std::to_string(rng() % 12);
    }
    const std::vector<std::size_t> ks = {1, 5};
    const auto rows = semantic_search_eval(q, t, gold, ks);
    EXPECT_LE(rows[0].value, rows[1].value);
    const auto scaled = semantic_search_eval(q, t_scaled, gold, ks);
    EXPECT_NEAR(scaled[0].value, rows[0].value, 1e-12);
    EXPECT_NEAR(scaled[1].value, rows[1].value, 1e-12);
  }
}

struct FaqFixture {
  Bm25Index index;
  TokenMatrixStore queries{2};
  TokenMatrixStore docs{2};
};

// "pix pix" outranks "pix conta" lexically for the query "pix".
FaqFixture faq_fixture(bool favor_lexical_winner) {
  const std::vector<Document> docs = {{"a1", "pix conta"}, {"a2", "pix pix"}, {"a3", "boleto"}};
  FaqFixture f{Bm25Index::build(docs)};
  f.queries.add("q", std::vector<double>{1, 0});
  f.docs.add("a1", std::vector<double>{favor_lexical_winner ? 0.0 : 1.0, favor_lexical_winner ? 1.0 : 0.0});
  f.docs.add("a2", std::vector<double>{favor_lexical_winner ? 1.0 : 0.0, favor_lexical_winner ? 0.0 : 1.0});
  f.docs.add("a3", std::vector<double>{1, 1});
  return f;
}

TEST(FaqEval, IdenticalRankingsGiveZeroGain) {
  const auto f = faq_fixture(true);
  const std::vector<QueryText> queries = {{"q", "pix"}};
  const std::vector<std::size_t> ks = {1, 5};
  const auto r = faq_retrieval_eval(queries, f.index, f.queries, f.docs, {{"q", "a2"}}, {}, ks);
  ASSERT_EQ(r.gains.size(), 2u);
  for (const auto& g : r.gains) {
    ASSERT_TRUE(g.percent.has_value());
    EXPECT_EQ(*g.percent, 0.0);
  }
}

TEST(FaqEval, ReRankingMovesGoldToTop) {
  const auto f = faq_fixture(false);
  const std::vector<QueryText> queries = {{"q", "pix"}};
  const std::vector<std::size_t> ks = {1, 5};
  const auto r = faq_retrieval_eval(queries, f.index, f.queries, f.docs, {{"q", "a1"}}, {}, ks,
                                    {"", "test", "answer"});
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].system, kBm25System);
  EXPECT_EQ(r.rows[0].value, 0.0);
  EXPECT_EQ(r.rows[1].value, 0.5);
  EXPECT_EQ(r.rows[2].system, kTwoStageSystem);
  EXPECT_EQ(r.rows[2].value, 1.0);
  EXPECT_EQ(r.rows[3].value, 1.0);
  EXPECT_FALSE(r.gains[0].percent.has_value());
  EXPECT_DOUBLE_EQ(*r.gains[1].percent, 100.0);

  const auto csv = reports_to_csv(r.rows, r.gains, {"", "test", "answer"});
  EXPECT_EQ(csv,
            "system,dataset,target,metric,k,value\n"
            "bm25+,test,answer,mrr,1,0\n"
            "bm25+,test,answer,mrr,5,0.5\n"
            "two_stage,test,answer,mrr,1,1\n"
            "two_stage,test,answer,mrr,5,1\n"
            "two_stage,test,answer,gain_pct,1,NA\n"
            "two_stage,test,answer,gain_pct,5,100\n");
}

TEST(Gold, RoundTripAndCorpusTargets) {
  testing::TempDir dir;
  const GoldMapping gold = {{"q1", "a"}, {"q2", "b"}};
  write_gold(dir / "g.jsonl", gold);
  EXPECT_EQ(load_gold(dir / "g.jsonl"), gold);
  const Corpus c({{"1", "q", "cat", "ans"}});
  EXPECT_EQ(gold_from_corpus(c, GoldTarget::kCategory), (GoldMapping{{"1", "cat"}}));
  EXPECT_EQ(gold_from_corpus(c, GoldTarget::kId), (GoldMapping{{"1", "1"}}));
}

TEST(Queries, AcceptsThreeShapes) {
  testing::TempDir dir;
  testing::write_file(dir / "q.jsonl",
                      "{\"id\":\"a\",\"question\":\"x\",\"category\":\"c\",\"answer\":\"y\"}\n"
                      "{\"original_id\":\"b\",\"text\":\"z\",\"bucket\":\"SYNONYM\"}\n"
                      "{\"query_id\":\"c\",\"text\":\"w\"}\n");
  const auto q = load_queries(dir / "q.jsonl");
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q[1].id, "b");
  EXPECT_EQ(q[2].text, "w");
}

}  // namespace
}  // namespace faqir
