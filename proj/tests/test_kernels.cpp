#include <atomic>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "spm/checks.hpp"
#include "spm/kernels.hpp"
#include "spm/space.hpp"

using namespace spm;

TEST(Kernels, ArgminParallelMatchesSerial) {
  auto f = [](std::size_t i) { return std::sin(0.01 * static_cast<double>(i)) * std::cos(0.37 * static_cast<double>(i)); };
  const auto a = kernels::argmin(100000, f, kernels::Exec::serial);
  const auto b = kernels::argmin(100000, f, kernels::Exec::parallel);
  EXPECT_EQ(a.index, b.index);
  EXPECT_EQ(a.value, b.value);
}

TEST(Kernels, TiesResolveToLowestIndex) {
  auto f = [](std::size_t i) { return (i % 1000 == 17) ? -1.0 : 0.0; };
  for (auto exec : {kernels::Exec::serial, kernels::Exec::parallel}) {
    EXPECT_EQ(kernels::argmin(50000, f, exec).index, 17u);
    EXPECT_EQ(kernels::argmax(50000, [&](std::size_t i) { return -f(i); }, exec).index, 17u);
  }
}

TEST(Kernels, ForEachVisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(10000);
  kernels::for_each_index(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Kernels, ExceptionsPropagateFromParallelRegion) {
  EXPECT_THROW(kernels::for_each_index(1000, [](std::size_t i) {
    if (i == 500) throw StructuralError("boom");
  }),
               StructuralError);
}

TEST(Kernels, SegmentSearchIsBitIdentical) {
  const LpSpace s(2, 3.0);
  const PointSet a = PointSet::segment(Point{0.0, 1.0}, Point{2.0, -1.0});
  const PointSet b = PointSet::segment(Point{1.0, 1.0}, Point{-0.5, 0.2});
  SegmentSearch serial;
  serial.exec = kernels::Exec::serial;
  EXPECT_EQ(capital_phi(s, a, b, serial).value, capital_phi(s, a, b).value);
  EXPECT_EQ(hausdorff(s, a, b, serial).value, hausdorff(s, a, b).value);
}

TEST(Kernels, SuitesAgreeAcrossExecutionModes) {
  CheckOptions serial;
  serial.samples = 30;
  serial.exec = kernels::Exec::serial;
  CheckOptions parallel = serial;
  parallel.exec = kernels::Exec::parallel;
  for (const char* suite : {"space", "convex", "equilibrium"}) {
    const Report a = run_suite(suite, serial), b = run_suite(suite, parallel);
    ASSERT_EQ(a.checks.size(), b.checks.size());
    for (std::size_t k = 0; k < a.checks.size(); ++k) {
      EXPECT_EQ(a.checks[k].worst, b.checks[k].worst) << suite << " " << a.checks[k].name;
      EXPECT_EQ(a.checks[k].passed, b.checks[k].passed);
    }
  }
}
