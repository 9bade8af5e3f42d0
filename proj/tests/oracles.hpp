#pragma once

// Independent reference implementations used only by tests. None of these
// touch the inverted index, the OpenMP kernels or the library's metric code;
// they recompute everything from raw inputs with the plainest loops possible.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace faqir::oracle {

struct RawDoc {
  std::string id;
  std::vector<std::string> tokens;
};

inline std::size_t count_of(const std::vector<std::string>& tokens, const std::string& t) {
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), t));
}

// BM25+ straight from the definition, scanning every document for df.
inline double bm25_plus(const std::vector<RawDoc>& docs, const std::vector<std::string>& query,
                        std::size_t doc, double k1, double b, double delta) {
  double total_len = 0;
  for (const auto& d : docs) total_len += static_cast<double>(d.tokens.size());
  const double avgdl = total_len / static_cast<double>(docs.size());
  const double n = static_cast<double>(docs.size());
  const double len = static_cast<double>(docs[doc].tokens.size());
  double score = 0;
  for (const auto& t : query) {
    const double tf = static_cast<double>(count_of(docs[doc].tokens, t));
    if (tf == 0) continue;
    double df = 0;
    for (const auto& d : docs) df += count_of(d.tokens, t) > 0 ? 1 : 0;
    const double idf = std::log((n + 1) / df);
    score += idf * (((k1 + 1) * tf) / (k1 * (1 - b + b * len / avgdl) + tf) + delta);
  }
  return score;
}

// Classic BM25 (no lower bound), written separately from the BM25+ oracle.
inline double bm25_classic(const std::vector<RawDoc>& docs, const std::vector<std::string>& query,
                           std::size_t doc, double k1, double b) {
  double total_len = 0;
  for (const auto& d : docs) total_len += static_cast<double>(d.tokens.size());
  const double avgdl = total_len / static_cast<double>(docs.size());
  double score = 0;
  for (const auto& t : query) {
    const double tf = static_cast<double>(count_of(docs[doc].tokens, t));
    if (tf == 0) continue;
    double df = 0;
    for (const auto& d : docs) df += count_of(d.tokens, t) > 0 ? 1 : 0;
    const double K = k1 * (1 - b + b * static_cast<double>(docs[doc].tokens.size()) / avgdl);
    score += std::log((static_cast<double>(docs.size()) + 1) / df) * tf * (k1 + 1) / (tf + K);
  }
  return score;
}

// Scores every document, keeps positives, sorts by (score desc, id asc).
inline std::vector<std::pair<std::string, double>> brute_top_k(
    const std::vector<RawDoc>& docs, const std::vector<std::string>& query, std::size_t k,
    double k1, double b, double delta) {
  std::vector<std::pair<std::string, double>> all;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const double s = bm25_plus(docs, query, i, k1, b, delta);
    if (s > 0) all.emplace_back(docs[i].id, s);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// MRR written as a direct average of 1/position with a linear search.
inline double naive_mrr(const std::vector<std::pair<std::string, std::vector<std::string>>>& runs,
                        const std::map<std::string, std::string>& gold, std::size_t k) {
  double sum = 0;
  for (const auto& [qid, ids] : runs) {
    const auto& target = gold.at(qid);
    for (std::size_t pos = 1; pos <= ids.size() && pos <= k; ++pos) {
      if (ids[pos - 1] == target) {
        sum += 1.0 / static_cast<double>(pos);
        break;
      }
    }
  }
  return sum / static_cast<double>(runs.size());
}

// F1 from an explicit confusion matrix over the union of labels.
struct F1Reference {
  double macro, micro, weighted;
};

inline F1Reference confusion_f1(const std::vector<std::string>& gold,
                                const std::vector<std::string>& pred) {
  std::vector<std::string> labels(gold);
  labels.insert(labels.end(), pred.begin(), pred.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  const std::size_t L = labels.size();
  const auto idx = [&](const std::string& s) {
    return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), s) - labels.begin());
  };
  std::vector<std::vector<double>> cm(L, std::vector<double>(L, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) cm[idx(gold[i])][idx(pred[i])] += 1;

  double macro = 0, weighted = 0, tp_all = 0, fp_all = 0, fn_all = 0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < L; ++c) {
    double tp = cm[c][c], row = 0, col = 0;
    for (std::size_t j = 0; j < L; ++j) {
      row += cm[c][j];
      col += cm[j][c];
    }
    const double p = col == 0 ? 0 : tp / col;
    const double r = row == 0 ? 0 : tp / row;
    const double f = (p + r) == 0 ? 0 : 2 * p * r / (p + r);
    tp_all += tp;
    fp_all += col - tp;
    fn_all += row - tp;
    if (row > 0) {
      ++present;
      macro += f;
      weighted += f * row;
    }
  }
  const double mp = tp_all / (tp_all + fp_all);
  const double mr = tp_all / (tp_all + fn_all);
  const double micro = (mp + mr) == 0 ? 0 : 2 * mp * mr / (mp + mr);
  return {macro / static_cast<double>(present), micro, weighted / static_cast<double>(gold.size())};
}

using Rows = std::vector<std::vector<double>>;

inline double naive_maxsim(Rows q, Rows d, bool normalize) {
  const auto unit = [](std::vector<double>& v) {
    double n = 0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
  };
  if (normalize) {
    for (auto& r : q) unit(r);
    for (auto& r : d) unit(r);
  }
  double total = 0;
  for (const auto& qi : q) {
    double best = -1e300;
    for (const auto& dj : d) {
      double s = 0;
      for (std::size_t c = 0; c < qi.size(); ++c) s += qi[c] * dj[c];
      best = std::max(best, s);
    }
    total += best;
  }
  return total;
}

inline double naive_cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double uv = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  return uv / std::sqrt(uu * vv);
}

}  // namespace faqir::oracle
