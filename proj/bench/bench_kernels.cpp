// Serial reference vs OpenMP kernels on synthetic inputs sized like a
// FAQ corpus (a few thousand answers).

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "faqir/kernels.hpp"

namespace {

using namespace faqir;
using namespace faqir::kernels;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

struct Bm25Input {
  std::vector<std::vector<Posting>> lists;
  std::vector<TermWeight> terms;
  std::vector<std::uint32_t> lengths;
  Bm25Norm norm;

  explicit Bm25Input(std::size_t n_docs) : lengths(n_docs) {
    std::mt19937_64 rng(7);
    for (auto& l : lengths) l = 10 + static_cast<std::uint32_t>(rng() % 150);
    lists.resize(8);
    for (auto& list : lists) {
      for (std::uint32_t d = 0; d < n_docs; ++d) {
        if (rng() % 4 == 0) list.push_back({d, 1 + static_cast<std::uint32_t>(rng() % 5)});
      }
    }
    for (const auto& list : lists) terms.push_back({list, 1.5});
    norm = {1.2, 0.75, 1.0, 85.0, lengths};
  }
};

template <auto Kernel>
void bm25(benchmark::State& state) {
  const Bm25Input input(static_cast<std::size_t>(state.range(0)));
  std::vector<double> scores(input.lengths.size());
  for (auto _ : state) {
    std::fill(scores.begin(), scores.end(), 0.0);
    Kernel(input.terms, input.norm, scores);
    benchmark::DoNotOptimize(scores.data());
  }
}

template <auto Kernel>
void maxsim(benchmark::State& state) {
  const std::size_t dim = 128, n_docs = static_cast<std::size_t>(state.range(0));
  const auto q = random_values(32 * dim, 1);
  const auto d = random_values(n_docs * 32 * dim, 2);
  std::vector<MatrixView> docs;
  for (std::size_t i = 0; i < n_docs; ++i) docs.push_back({d.data() + i * 32 * dim, 32, dim});
  std::vector<double> out(n_docs);
  for (auto _ : state) {
    Kernel({q.data(), 32, dim}, docs, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Kernel>
void cosine(benchmark::State& state) {
  const std::size_t dim = 768, n = static_cast<std::size_t>(state.range(0));
  const auto q = random_values(n * dim, 3);
  const auto t = random_values(n * dim, 4);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    Kernel({q.data(), n, dim}, {t.data(), n, dim}, out);
    benchmark::DoNotOptimize(out.data());
  }
}

BENCHMARK(bm25<serial::bm25_accumulate>)->Name("bm25_accumulate/serial")->Arg(2000)->Arg(20000);
BENCHMARK(bm25<parallel::bm25_accumulate>)->Name("bm25_accumulate/parallel")->Arg(2000)->Arg(20000);
BENCHMARK(maxsim<serial::maxsim_batch>)->Name("maxsim_batch/serial")->Arg(50)->Arg(500);
BENCHMARK(maxsim<parallel::maxsim_batch>)->Name("maxsim_batch/parallel")->Arg(50)->Arg(500);
BENCHMARK(cosine<serial::cosine_matrix>)->Name("cosine_matrix/serial")->Arg(100)->Arg(600);
BENCHMARK(cosine<parallel::cosine_matrix>)->Name("cosine_matrix/parallel")->Arg(100)->Arg(600);

}  // namespace

BENCHMARK_MAIN();
