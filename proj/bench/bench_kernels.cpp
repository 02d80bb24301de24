// Serial reference versus OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include <cmath>

#include <benchmark/benchmark.h>

#include "spm/checks.hpp"
#include "spm/kernels.hpp"
#include "spm/space.hpp"

using namespace spm;

namespace {

kernels::Exec mode(const benchmark::State& state) { return state.range(0) == 0 ? kernels::Exec::serial : kernels::Exec::parallel; }

// Grid minimization of phi(., x) on [-1, 1]^2 in l_4.
void BM_GridArgmin(benchmark::State& state) {
  const LpSpace s(2, 4.0);
  const Point x{3.0, 0.5};
  const int n = 1000;
  for (auto _ : state) {
    const auto best = kernels::argmin(
        static_cast<std::size_t>(n) * n,
        [&](std::size_t k) {
          const Point y{-1.0 + 2.0 * static_cast<double>(k % n) / (n - 1), -1.0 + 2.0 * static_cast<double>(k / n) / (n - 1)};
          return lyapunov_phi(s, y, x);
        },
        mode(state));
    benchmark::DoNotOptimize(best);
  }
}

void BM_CapitalPhiSegments(benchmark::State& state) {
  const LpSpace s(3, 3.0);
  const PointSet a = PointSet::segment(Point{0.0, 1.0, -1.0}, Point{2.0, -1.0, 0.5});
  const PointSet b = PointSet::segment(Point{1.0, 1.0, 1.0}, Point{-0.5, 0.2, 0.0});
  SegmentSearch search;
  search.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(capital_phi(s, a, b, search));
}

void BM_ConvexSuite(benchmark::State& state) {
  CheckOptions o;
  o.samples = 50;
  o.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(check_convex(o));
}

}  // namespace

BENCHMARK(BM_GridArgmin)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CapitalPhiSegments)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvexSuite)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
