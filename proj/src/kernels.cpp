#include "faqir/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace faqir::kernels {

namespace {

inline double term_contribution(const Posting& p, double idf, const Bm25Norm& norm) {
  const double tf = p.tf;
  const double len_ratio = static_cast<double>(norm.doc_lengths[p.doc]) / norm.avg_doc_length;
  const double denom = norm.k1 * (1.0 - norm.b + norm.b * len_ratio) + tf;
  return idf * ((norm.k1 + 1.0) * tf / denom + norm.delta);
}

std::vector<double> row_norms(MatrixView m) {
  std::vector<double> norms(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const auto r = m.row(i);
    norms[i] = std::sqrt(dot(r, r));
  }
  return norms;
}

inline double clamped_cosine(double d, double nu, double nv) {
  return std::clamp(d / (nu * nv), -1.0, 1.0);
}

}  // namespace

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double maxsim(MatrixView query, MatrixView doc) {
  double total = 0.0;
  for (std::size_t i = 0; i < query.rows; ++i) {
    const auto q = query.row(i);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < doc.rows; ++j) best = std::max(best, dot(q, doc.row(j)));
    total += best;
  }
  return total;
}

namespace serial {

void bm25_accumulate(std::span<const TermWeight> terms, const Bm25Norm& norm,
                     std::span<double> scores) {
  for (const auto& term : terms) {
    for (const auto& p : term.postings) scores[p.doc] += term_contribution(p, term.idf, norm);
  }
}

void maxsim_batch(MatrixView query, std::span<const MatrixView> docs, std::span<double> out) {
  for (std::size_t i = 0; i < docs.size(); ++i) out[i] = maxsim(query, docs[i]);
}

void cosine_matrix(MatrixView queries, MatrixView targets, std::span<double> out) {
  const auto qn = row_norms(queries);
  const auto tn = row_norms(targets);
  for (std::size_t i = 0; i < queries.rows; ++i) {
    for (std::size_t j = 0; j < targets.rows; ++j) {
      out[i * targets.rows + j] =
          clamped_cosine(dot(queries.row(i), targets.row(j)), qn[i], tn[j]);
    }
  }
}

}  // namespace serial

namespace parallel {

void bm25_accumulate(std::span<const TermWeight> terms, const Bm25Norm& norm,
                     std::span<double> scores) {
  // Postings within one term hit distinct docs, so the inner loop is
  // race-free; the implicit barrier keeps per-doc term order intact.
#pragma omp parallel
  for (const auto& term : terms) {
    const auto n = static_cast<std::ptrdiff_t>(term.postings.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& p = term.postings[i];
      scores[p.doc] += term_contribution(p, term.idf, norm);
    }
  }
}

void maxsim_batch(MatrixView query, std::span<const MatrixView> docs, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = maxsim(query, docs[i]);
}

void cosine_matrix(MatrixView queries, MatrixView targets, std::span<double> out) {
  const auto qn = row_norms(queries);
  const auto tn = row_norms(targets);
  const auto nq = static_cast<std::ptrdiff_t>(queries.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < nq; ++i) {
    const auto q = queries.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < targets.rows; ++j) {
      out[i * targets.rows + j] = clamped_cosine(dot(q, targets.row(j)), qn[i], tn[j]);
    }
  }
}

}  // namespace parallel

}  // namespace faqir::kernels
