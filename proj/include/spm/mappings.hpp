#pragma once

// Catalog of multivalued mappings T with exact image descriptions, the
// best-approximation operator P_T x = {y in Tx : |x - y| = dist(x, Tx)} and a
// randomized check of relative quasi-nonexpansiveness of P_T.

#include <cstdint>
#include <optional>
#include <variant>

#include "spm/convex.hpp"

namespace spm {

/// Which element of T x the iteration uses: the best approximation (P_T) or
/// the midpoint of the image, which is admissible when T p = {p} on fixed points.
enum class SelectFrom { PT, image_midpoint };

/// T x = [center, center + beta (x - center)].
struct SegmentContraction {
  Point center;
  double beta;
};

/// T x = {Pi_K x}.
struct ProjectionMap {
  Polyhedron K;
};

/// T x = {M x + t} with a registered fixed point.
struct SingleValuedAffine {
  Eigen::MatrixXd M;
  Point t;
  Point fixed_point;
};

using FixedSet = std::variant<Point, Polyhedron>;

class MultivaluedMap {
 public:
  using Variant = std::variant<SegmentContraction, ProjectionMap, SingleValuedAffine>;

  /// beta must lie in (0, 1]. The declared fixed set is {center}.
  static MultivaluedMap segment_contraction(Point center, double beta, SelectFrom select = SelectFrom::PT);
  /// Any beta > 0. Only for fixtures that must violate the contraction property.
  static MultivaluedMap segment_contraction_unchecked(Point center, double beta);
  /// Fixed set K.
  static MultivaluedMap projection(Polyhedron K, SelectFrom select = SelectFrom::PT);
  /// Admitted only if M p + t = p and phi(Tx, p) <= phi(x, p), phi(p, Tx) <= phi(p, x)
  /// hold on random samples.
  static MultivaluedMap affine(const LpSpace& space, Eigen::MatrixXd M, Point t, Point fixed_point,
                               int samples = 1000, std::uint64_t seed = 7);

  const Variant& variant() const { return v_; }
  SelectFrom select_from() const { return select_; }
  int dim() const;
  bool single_valued() const { return !std::holds_alternative<SegmentContraction>(v_); }
  /// Declared fixed points (a subset of F(T), nonempty by construction).
  FixedSet fixed_set() const;

 private:
  MultivaluedMap(Variant v, SelectFrom select) : v_(std::move(v)), select_(select) {}
  Variant v_;
  SelectFrom select_;
};

/// A chosen element z of T x.
struct Selection {
  Point z;
};

PointSet image(const LpSpace& space, const MultivaluedMap& map, const Point& x,
               const SolverSettings& settings = {});

/// Nearest point of T x to x.
Selection evaluate_PT(const LpSpace& space, const MultivaluedMap& map, const Point& x,
                      const SolverSettings& settings = {});

/// The element prescribed by the map's SelectFrom flag.
Selection select(const LpSpace& space, const MultivaluedMap& map, const Point& x,
                 const SolverSettings& settings = {});

struct RqneReport {
  /// max over draws of Phi(P_T x, P_T p) - phi(x, p); positive means violation.
  double max_violation = 0.0;
  std::optional<Point> witness;
  /// Same with the fixed point as first argument: Phi(P_T p, P_T x) - phi(p, x).
  double max_violation_fixed_first = 0.0;
};

/// Draws `samples` points x uniformly from a cube of half-width `radius`
/// around the declared fixed set and fixed points p from it.
RqneReport check_rqne(const LpSpace& space, const MultivaluedMap& map, int samples, std::uint64_t seed,
                      const SolverSettings& settings = {}, double radius = 10.0);

}  // namespace spm
