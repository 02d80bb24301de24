#include <cmath>
#include <utility>

#include <gtest/gtest.h>

#include "spm/checks.hpp"
#include "spm/mappings.hpp"

using namespace spm;

namespace {

Polyhedron left_halfplane() {
  return Polyhedron(Box{Eigen::Vector2d(-100.0, -100.0), Eigen::Vector2d(100.0, 100.0)},
                    {HalfSpace(DualPoint{1.0, 0.0}, 0.0)}, Point{-1.0, 0.0});
}

}  // namespace

TEST(Image, SegmentContraction) {
  const LpSpace s(1, 2.0);
  const PointSet img = image(s, MultivaluedMap::segment_contraction(Point{0.0}, 0.5), Point{2.0});
  ASSERT_TRUE(img.is_segment());
  for (double t : {0.0, 0.5, 1.0}) EXPECT_TRUE(img.contains(Point{t}, 1e-15));
  EXPECT_FALSE(img.contains(Point{1.1}, 1e-3));
  EXPECT_FALSE(img.contains(Point{-0.1}, 1e-3));

  const PointSet at_center = image(s, MultivaluedMap::segment_contraction(Point{0.3}, 0.7), Point{0.3});
  EXPECT_TRUE(at_center.is_singleton());
}

TEST(Image, ProjectionFixesMembers) {
  const PointSet img = image(LpSpace(2, 3.0), MultivaluedMap::projection(left_halfplane()), Point{-2.0, 4.0});
  ASSERT_TRUE(img.is_singleton());
  EXPECT_TRUE(img.contains(Point{-2.0, 4.0}, 1e-9));
}

TEST(EvaluatePT, Examples) {
  const LpSpace h(2, 2.0);
  const Point z = evaluate_PT(h, MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 0.9), Point{5.0, 3.0}).z;
  EXPECT_NEAR(z[0], 4.5, 1e-15);
  EXPECT_NEAR(z[1], 2.7, 1e-15);
  const Point q = evaluate_PT(h, MultivaluedMap::projection(left_halfplane()), Point{1.0, 5.0}).z;
  EXPECT_LT((q.coords() - Eigen::Vector2d(0.0, 5.0)).norm(), 1e-8);
}

TEST(EvaluatePT, FixedPointsAreKept) {
  const LpSpace s(2, 3.0);
  const Point p{1.0, -1.0};
  const Eigen::Matrix2d M = Eigen::Vector2d(0.5, 0.8).asDiagonal();
  // T x = M x + t with T p = p.
  const Point t(p.coords() - M * p.coords());
  const std::vector<std::pair<MultivaluedMap, Point>> cases{
      {MultivaluedMap::segment_contraction(p, 0.6), p},
      {MultivaluedMap::projection(left_halfplane()), Point{-3.0, 2.0}},
      {MultivaluedMap::affine(s, M, t, p), p}};
  for (const auto& [map, x] : cases) EXPECT_LT((evaluate_PT(s, map, x).z - x).coords().norm(), 1e-9);
}

TEST(EvaluatePT, NearestPointOfSegment) {
  // Dense parameter search over the image for the nearest point in l_p.
  for (double p : {1.5, 3.0}) {
    const LpSpace s(2, p);
    const Point c{1.0, -1.0}, x{3.0, 2.5};
    const Point z = evaluate_PT(s, MultivaluedMap::segment_contraction(c, 0.7), x).z;
    double best = INFINITY;
    for (int k = 0; k <= 100000; ++k) {
      const double t = 0.7 * k / 100000.0;
      best = std::min(best, norm(s, x - (c + t * (x - c))));
    }
    EXPECT_LE(norm(s, x - z), best + 1e-12) << "p = " << p;
  }
}

TEST(CheckRqne, CatalogExamples) {
  const LpSpace h(2, 2.0);
  EXPECT_LE(check_rqne(h, MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 0.9), 200, 3).max_violation, 0.0);
  EXPECT_NEAR(check_rqne(h, MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 1.0), 200, 3).max_violation, 0.0, 1e-9);
  const RqneReport broken = check_rqne(h, MultivaluedMap::segment_contraction_unchecked(Point{0.0, 0.0}, 1.2), 200, 3);
  EXPECT_GT(broken.max_violation, 0.0);
  ASSERT_TRUE(broken.witness.has_value());
  // Phi([0, 1.2 x], {0}) - phi(x, 0) = 0.44 |x|^2 at the witness.
  EXPECT_NEAR(broken.max_violation, 0.44 * broken.witness->coords().squaredNorm(), 1e-6 * broken.max_violation);
}

TEST(CheckRqne, RejectsZeroSamples) {
  EXPECT_THROW(check_rqne(LpSpace(2, 2.0), MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 0.9), 0, 1), StructuralError);
}

TEST(Mappings, Validation) {
  EXPECT_THROW(MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 1.2), StructuralError);
  EXPECT_THROW(MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 0.0), StructuralError);
  const LpSpace s(2, 2.0);
  EXPECT_THROW(MultivaluedMap::affine(s, Eigen::Matrix2d::Identity() * 0.5, Point{1.0, 0.0}, Point{0.0, 0.0}), StructuralError);
}

TEST(MappingsSuite, InvariantsHold) {
  CheckOptions o;
  o.samples = 100;
  const Report r = check_mappings(o);
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(MappingsSuite, BrokenFixtureIsCaught) {
  CheckOptions o;
  o.samples = 50;
  o.broken_fixture = true;
  const Report r = check_mappings(o);
  EXPECT_FALSE(r.ok());
  bool seen = false;
  for (const auto& c : r.checks) {
    if (c.name.find("broken") == std::string::npos) continue;
    seen = true;
    EXPECT_FALSE(c.passed) << c.name;
    EXPECT_NE(c.detail.find("witness"), std::string::npos);
  }
  EXPECT_TRUE(seen);
}
