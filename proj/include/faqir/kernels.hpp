#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "faqir/bm25.hpp"
#include "faqir/matrix.hpp"

// Data-parallel scoring kernels. Each kernel has a serial reference and an
// OpenMP version. Every output element is produced by the same sequential
// inner loop in both, so results are bit-identical regardless of thread
// count or schedule.
namespace faqir::kernels {

struct TermWeight {
  std::span<const Posting> postings;
  double idf = 0.0;
};

struct Bm25Norm {
  double k1 = 1.2;
  double b = 0.75;
  double delta = 1.0;
  double avg_doc_length = 1.0;
  std::span<const std::uint32_t> doc_lengths;
};

double dot(std::span<const double> u, std::span<const double> v);

// Sum over query rows of the best dot product against any doc row.
double maxsim(MatrixView query, MatrixView doc);

namespace serial {

// scores[d] += idf * ((k1+1)tf / (k1(1-b+b|d|/avgdl) + tf) + delta) for every
// posting of every term, terms visited in order. `scores` spans all docs.
void bm25_accumulate(std::span<const TermWeight> terms, const Bm25Norm& norm,
                     std::span<double> scores);

// out[i] = maxsim(query, docs[i]).
void maxsim_batch(MatrixView query, std::span<const MatrixView> docs, std::span<double> out);

// out[i * targets.rows + j] = clamped cosine of queries row i and targets row
// j. Rows must have nonzero norm.
void cosine_matrix(MatrixView queries, MatrixView targets, std::span<double> out);

}  // namespace serial

namespace parallel {

void bm25_accumulate(std::span<const TermWeight> terms, const Bm25Norm& norm,
                     std::span<double> scores);
void maxsim_batch(MatrixView query, std::span<const MatrixView> docs, std::span<double> out);
void cosine_matrix(MatrixView queries, MatrixView targets, std::span<double> out);

}  // namespace parallel

}  // namespace faqir::kernels
