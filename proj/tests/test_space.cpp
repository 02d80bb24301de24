#include <cmath>

#include <gtest/gtest.h>

#include "spm/checks.hpp"
#include "spm/space.hpp"

using namespace spm;

namespace {

// Power sum norm without scaling; fine for the small test vectors.
double plain_norm(const Eigen::VectorXd& x, double p) {
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

// Central differences of 1/2 |x|_p^2.
Eigen::VectorXd half_norm_sq_gradient(const Eigen::VectorXd& x, double p) {
  const double h = 1e-6;
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (0.5 * std::pow(plain_norm(a, p), 2) - 0.5 * std::pow(plain_norm(b, p), 2)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(Norm, Examples) {
  EXPECT_DOUBLE_EQ(norm(LpSpace(2, 2.0), Point{3.0, 4.0}), 5.0);
  EXPECT_EQ(norm(LpSpace(3, 1.5), Point{0.0, 0.0, 0.0}), 0.0);
  EXPECT_NEAR(norm(LpSpace(2, 4.0), Point{1.0, 1.0}), std::pow(2.0, 0.25), 1e-15);
}

TEST(Norm, LargeCoordinatesDoNotOverflow) {
  const Point x{1e200, 1e200};
  EXPECT_NEAR(norm(LpSpace(2, 4.0), x) / 1e200, std::pow(2.0, 0.25), 1e-14);
}

TEST(DualityMap, HilbertIsIdentity) {
  const DualPoint j = duality_map(LpSpace(2, 2.0), Point{1.0, -2.0});
  EXPECT_EQ(j.coords(), Eigen::Vector2d(1.0, -2.0));
}

TEST(DualityMap, ZeroMapsToZero) {
  EXPECT_TRUE(duality_map(LpSpace(3, 3.0), Point{0.0, 0.0, 0.0}).coords().isZero(0.0));
}

TEST(DualityMap, P4MatchesFiniteDifferenceGradient) {
  const Eigen::VectorXd x = Eigen::Vector2d(1.0, 1.0);
  const DualPoint j = duality_map(LpSpace(2, 4.0), Point(x));
  const Eigen::VectorXd fd = half_norm_sq_gradient(x, 4.0);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(j[i], std::pow(2.0, -0.5), 1e-14);
    EXPECT_NEAR(j[i], fd[i], 1e-8);
  }
}

TEST(DualityMap, GradientOracleAcrossExponents) {
  const Eigen::VectorXd x = Eigen::Vector3d(0.7, -1.3, 2.1);
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const DualPoint j = duality_map(LpSpace(3, p), Point(x));
    EXPECT_LT((j.coords() - half_norm_sq_gradient(x, p)).norm(), 1e-7) << "p = " << p;
  }
}

TEST(InverseDualityMap, Examples) {
  EXPECT_EQ(inverse_duality_map(LpSpace(2, 2.0), DualPoint{5.0, 7.0}).coords(), Eigen::Vector2d(5.0, 7.0));
  const Point back = inverse_duality_map(LpSpace(2, 4.0), DualPoint{std::pow(2.0, -0.5), std::pow(2.0, -0.5)});
  EXPECT_NEAR(back[0], 1.0, 1e-14);
  EXPECT_NEAR(back[1], 1.0, 1e-14);
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const LpSpace s(3, p);
    const Point x{1.0, -3.0, 2.0};
    EXPECT_LT((inverse_duality_map(s, duality_map(s, x)) - x).coords().norm(), 1e-13) << "p = " << p;
  }
}

TEST(LyapunovPhi, HilbertReducesToSquaredDistance) {
  EXPECT_DOUBLE_EQ(lyapunov_phi(LpSpace(2, 2.0), Point{1.0, 0.0}, Point{0.0, 1.0}), 2.0);
}

TEST(LyapunovPhi, VanishesOnDiagonal) {
  const Point x{0.3, -2.0};
  for (double p : {1.5, 3.0}) EXPECT_EQ(lyapunov_phi(LpSpace(2, p), x, x), 0.0);
}

TEST(LyapunovPhi, P4Example) {
  // |x|^2 - 2<x, Jy> + |y|^2 with the pieces computed independently.
  const Eigen::Vector2d x(1.0, 1.0), y(2.0, 0.0);
  const double nx = plain_norm(x, 4.0), ny = plain_norm(y, 4.0);
  const double oracle = nx * nx - 2.0 * x.dot(half_norm_sq_gradient(y, 4.0)) + ny * ny;
  const double value = lyapunov_phi(LpSpace(2, 4.0), Point(Eigen::VectorXd(x)), Point(Eigen::VectorXd(y)));
  EXPECT_NEAR(value, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(value, oracle, 1e-7);
}

TEST(NormSqDifference, MatchesDirectEvaluation) {
  const Point x{1.5, -0.25, 3.0}, u{-2.0, 0.5, 1.0};
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const LpSpace s(3, p);
    const double direct = std::pow(plain_norm(x.coords(), p), 2) - std::pow(plain_norm(u.coords(), p), 2);
    EXPECT_NEAR(norm_sq_difference(s, x, u), direct, 1e-13) << "p = " << p;
  }
}

TEST(NormSqDifference, CloseArgumentsKeepRelativeAccuracy) {
  // Long double reference for a difference far below double resolution of |x|^2.
  const Point x{3.0, 1.0}, u{3.0 + 1e-9, 1.0};
  for (double p : {1.5, 3.0, 4.0}) {
    const long double a = std::pow(std::pow(3.0L, p) + 1.0L, 2.0L / p);
    const long double b = std::pow(std::pow(3.0L + 1e-9L, p) + 1.0L, 2.0L / p);
    const double ref = static_cast<double>(a - b);
    EXPECT_NEAR(norm_sq_difference(LpSpace(2, p), x, u), ref, 1e-6 * std::abs(ref)) << "p = " << p;
  }
}

TEST(CapitalPhi, Examples) {
  const LpSpace h(2, 2.0);
  const PointSet v = PointSet::singleton(Point{0.4, -1.0});
  EXPECT_EQ(capital_phi(h, v, v).value, 0.0);
  const PointSet seg = PointSet::segment(Point{0.0, 0.0}, Point{1.0, 0.0});
  const PointSet origin = PointSet::singleton(Point{0.0, 0.0});
  EXPECT_NEAR(capital_phi(h, seg, origin).value, 1.0, 1e-12);
}

TEST(CapitalPhi, HilbertEqualsHausdorffSquared) {
  const LpSpace h(2, 2.0);
  const PointSet a = PointSet::segment(Point{0.0, 0.0}, Point{2.0, 1.0});
  const PointSet b = PointSet::segment(Point{1.0, -1.0}, Point{0.5, 3.0});
  const double H = hausdorff(h, a, b).value;
  EXPECT_NEAR(capital_phi(h, a, b).value, H * H, 1e-7);
  const PointSet list = PointSet::finite_list({Point{0.0, 0.0}, Point{1.0, 1.0}});
  const double H2 = hausdorff(h, a, list).value;
  EXPECT_NEAR(capital_phi(h, a, list).value, H2 * H2, 1e-7);
}

TEST(Hausdorff, Examples) {
  const LpSpace h(2, 2.0);
  const PointSet a = PointSet::segment(Point{0.0, 0.0}, Point{2.0, 0.0});
  EXPECT_EQ(hausdorff(h, a, a).value, 0.0);
  EXPECT_DOUBLE_EQ(hausdorff(h, PointSet::singleton(Point{0.0, 0.0}), PointSet::singleton(Point{3.0, 4.0})).value, 5.0);
  EXPECT_NEAR(hausdorff(h, a, PointSet::singleton(Point{0.0, 0.0})).value, 2.0, 1e-12);
}

TEST(Space, RejectsBadInput) {
  EXPECT_THROW(LpSpace(2, 1.0), StructuralError);
  EXPECT_THROW(LpSpace(0, 2.0), StructuralError);
  EXPECT_THROW(norm(LpSpace(2, 2.0), Point{1.0, 2.0, 3.0}), StructuralError);
  EXPECT_THROW(Point(Eigen::Vector2d(1.0, std::nan(""))), StructuralError);
  EXPECT_THROW(PointSet::finite_list({}), StructuralError);
}

TEST(SpaceSuite, InvariantsHold) {
  CheckOptions o;
  o.samples = 200;
  const Report r = check_space(o);
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}
