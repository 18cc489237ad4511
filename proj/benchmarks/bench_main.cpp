#include <benchmark/benchmark.h>

#include <random>

#include "traintrack/growth.hpp"
#include "traintrack/hyperbolicity.hpp"
#include "traintrack/nielsen.hpp"

namespace {

using namespace tt;

const Automorphism& fib() {
  static const Automorphism phi(2, {Word{1, 2}, Word{1}}, std::vector<Word>{Word{2}, Word{-2, 1}});
  return phi;
}

const Automorphism& plas() {
  static const Automorphism phi(3, {Word{2}, Word{3}, Word{1, 2}},
                                std::vector<Word>{Word{3, -1}, Word{1}, Word{2}});
  return phi;
}

// Random irreducible n x n matrix with a cyclic backbone.
IntMatrix random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, 3);
  IntMatrix m(static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d(rng) == 0 ? 1 : 0;
    m[static_cast<std::size_t>(i)][static_cast<std::size_t>((i + 1) % n)] = 1;
  }
  return m;
}

void BM_PfEigen(benchmark::State& state) {
  const IntMatrix m = random_matrix(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(pf_eigen(m));
}
BENCHMARK(BM_PfEigen)->Arg(4)->Arg(16)->Arg(64);

void BM_IterateWord(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::size_t letters = 0;
  for (auto _ : state) {
    const Word w = iterate(fib(), Word{1, 2, -1}, n);
    letters = w.length();
    benchmark::DoNotOptimize(w);
  }
  state.counters["letters"] = static_cast<double>(letters);
}
BENCHMARK(BM_IterateWord)->Arg(10)->Arg(20)->Arg(25);

void BM_EnumerateClasses(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_classes(3, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_EnumerateClasses)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_AtoroidalityProbe(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(atoroidality_probe(plas(), static_cast<int>(state.range(0)), 6));
}
BENCHMARK(BM_AtoroidalityProbe)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_CertificateSearch(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(certificate_search(plas(), 20, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CertificateSearch)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BoundedCancellation(benchmark::State& state) {
  const MapContext ctx(rose_of(plas()));
  for (auto _ : state) benchmark::DoNotOptimize(max_cancellation(ctx, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BoundedCancellation)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_NielsenSearch(benchmark::State& state) {
  const GraphMap f = rose_of(fib());
  for (auto _ : state) benchmark::DoNotOptimize(find_nielsen_paths(f, static_cast<int>(state.range(0)), 4));
}
BENCHMARK(BM_NielsenSearch)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
