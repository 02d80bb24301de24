#include <gtest/gtest.h>

#include "spm/algorithm.hpp"
#include "spm/scenarios.hpp"

using namespace spm;

namespace {

AlgorithmConfig one_dimensional() {
  return AlgorithmConfig{LpSpace(1, 2.0),
                         Polyhedron::box(Eigen::VectorXd::Constant(1, -10.0), Eigen::VectorXd::Constant(1, 10.0)),
                         {MultivaluedMap::segment_contraction(Point{0.0}, 0.5)},
                         Bifunction::zero(1),
                         constant_weights({0.5, 0.5}),
                         constant_r(1.0),
                         Point{8.0}};
}

}  // namespace

TEST(HalfspaceFromPair, Examples) {
  const LpSpace h(1, 2.0);
  EXPECT_TRUE(halfspace_from_pair(LpSpace(2, 3.0), Point{1.0, 2.0}, Point{1.0, 2.0}).is_vacuous());
  const HalfSpace c = halfspace_from_pair(h, Point{8.0}, Point{6.0});
  // {z : 2 z <= 14}.
  EXPECT_DOUBLE_EQ(c.a()[0], 2.0);
  EXPECT_DOUBLE_EQ(c.b(), 14.0);
}

TEST(HalfspaceFromPair, SlackIsHalfPhiDifference) {
  for (double p : {1.5, 3.0}) {
    const LpSpace s(2, p);
    const Point x{1.0, -2.0}, u{0.5, 0.25}, z{-3.0, 1.5};
    const HalfSpace c = halfspace_from_pair(s, x, u);
    EXPECT_NEAR(c.slack(z), 0.5 * (lyapunov_phi(s, z, x) - lyapunov_phi(s, z, u)), 1e-12);
  }
}

TEST(Step, OneDimensionalHandArithmetic) {
  const AlgorithmConfig config = one_dimensional();
  const IterationState s = step(initial_state(config), config);
  ASSERT_EQ(s.trace.size(), 1u);
  const StepDiagnostics& d = s.trace.front();
  // y = (8 + 4) / 2, u = y since F = 0 and 6 lies in C, cut {z <= 7}, x_1 = 7.
  EXPECT_DOUBLE_EQ(d.y[0], 6.0);
  EXPECT_NEAR(d.u[0], 6.0, 1e-12);
  EXPECT_NEAR(d.cut.b() / d.cut.a()[0], 7.0, 1e-12);
  EXPECT_NEAR(s.x[0], 7.0, 1e-10);
}

TEST(Step, StationaryAtCommonFixedPoint) {
  const Point c{0.5, -0.5};
  AlgorithmConfig config{LpSpace(2, 3.0),
                         Polyhedron::box(Eigen::Vector2d(-2.0, -2.0), Eigen::Vector2d(2.0, 2.0)),
                         {MultivaluedMap::segment_contraction(c, 1.0), MultivaluedMap::segment_contraction(c, 1.0)},
                         Bifunction::zero(2),
                         default_weights(2),
                         constant_r(1.0),
                         c};
  const IterationState s = step(initial_state(config), config);
  EXPECT_LT((s.x - c).coords().norm(), 1e-12);
  const RunResult r = run(config);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_LT((r.final - c).coords().norm(), 1e-12);
}

TEST(Run, ScenarioAReachesZero) {
  const Scenario s = scenario_a();
  const RunResult r = run(s.config);
  EXPECT_LE(r.trace.size(), 500u);
  EXPECT_LE(r.final.coords().norm(), 1e-4);
  const Report rep = verify_trace(r.trace, s.config, s.solution, r.converged);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Run, ScenarioBMatchesKktPoint) {
  // Both constraints active at (4, 3, 2): multipliers 3.5 and 1 give (0.5, 0.5, 1).
  const Scenario s = scenario_b();
  EXPECT_LT((s.solution.coords() - Eigen::Vector3d(0.5, 0.5, 1.0)).norm(), 1e-8);
  const RunResult r = run(s.config);
  EXPECT_LT((r.final.coords() - Eigen::Vector3d(0.5, 0.5, 1.0)).norm(), 1e-5);
}

TEST(VerifyTrace, OneStepTraceIsMonotoneVacuously) {
  const AlgorithmConfig config = one_dimensional();
  const IterationState s = step(initial_state(config), config);
  const Report rep = verify_trace(s.trace, config, Point{0.0}, false);
  const CheckResult* mono = rep.find("phi_to_x0_nondecreasing");
  ASSERT_NE(mono, nullptr);
  EXPECT_TRUE(mono->passed);
}

TEST(VerifyTrace, BrokenMapCutsOffTheSolution) {
  AlgorithmConfig config = scenario_a().config;
  config.maps = {MultivaluedMap::segment_contraction_unchecked(Point{0.0, 0.0}, 1.2)};
  config.weights = constant_weights({0.2, 0.8});
  const IterationState s = step(initial_state(config), config);
  const Report rep = verify_trace(s.trace, config, Point{0.0, 0.0}, false);
  const CheckResult* kept = rep.find("solution_retained");
  ASSERT_NE(kept, nullptr);
  EXPECT_FALSE(kept->passed);
}

TEST(Variants, HilbertPathMatchesBanachPathAtP2) {
  const Scenario s = scenario_d();
  AlgorithmConfig h = s.config;
  h.variant = Variant::hilbert;
  const RunResult a = run(s.config), b = run(h);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_LE((a.trace[k].x_next - b.trace[k].x_next).coords().norm(), 10 * s.config.settings.tol) << "step " << k;
  }
}

TEST(Config, ValidationNamesTheField) {
  AlgorithmConfig config = one_dimensional();
  config.r_schedule = constant_r(0.0);
  try {
    config.validate();
    FAIL() << "r = 0 accepted";
  } catch (const StructuralError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("r:", 0), 0u) << e.what();
  }
  config = one_dimensional();
  config.weights = constant_weights({1.0});
  EXPECT_THROW(config.validate(), StructuralError);
  config = one_dimensional();
  config.variant = Variant::hilbert;
  config.space = LpSpace(1, 3.0);
  EXPECT_THROW(config.validate(), StructuralError);
}
