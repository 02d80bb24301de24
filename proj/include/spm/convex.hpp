#pragma once

// Bounded polyhedra with a certified feasible point, Euclidean projection, a
// projected-gradient minimizer, and the
// generalized projection Pi_C x = argmin_{y in C} phi(y, x).

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "spm/space.hpp"

namespace spm {

/// Feasibility slack allowed for a polyhedron's stored witness.
inline constexpr double kWitnessTol = 1e-12;

/// {z : <z, a> <= b}. a == 0 is only allowed with b >= 0 (the whole space).
class HalfSpace {
 public:
  HalfSpace(DualPoint a, double b);

  static HalfSpace vacuous(int dim) { return HalfSpace(DualPoint::zero(dim), 0.0); }

  const DualPoint& a() const { return a_; }
  double b() const { return b_; }
  bool is_vacuous() const { return a_.coords().isZero(0.0); }
  int dim() const { return a_.dim(); }

  /// b - <z, a>; negative means z lies outside.
  double slack(const Point& z) const { return b_ - pairing(z, a_); }

 private:
  DualPoint a_;
  double b_;
};

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct SolverSettings {
  double tol = 1e-9;
  int max_iter = 100000;
  double ls_shrink = 0.5;
  /// Random feasible points used by optimality certificates.
  int certificate_samples = 100;
  std::uint64_t seed = 0x5eed;

  void validate() const;
};

/// Intersection of a coordinate box and finitely many half-spaces, together
/// with a point certified to satisfy every constraint within kWitnessTol.
class Polyhedron {
 public:
  Polyhedron(Box box, std::vector<HalfSpace> halfspaces, Point witness);

  /// The box itself, witnessed by its center.
  static Polyhedron box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const { return witness_.dim(); }
  const Box& bounds() const { return box_; }
  const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }
  const Point& witness() const { return witness_; }

  /// Largest constraint violation of z (0 when feasible).
  double max_violation(const Point& z) const;
  bool contains(const Point& z, double tol) const { return max_violation(z) <= tol; }

  /// This set intersected with `cut`. When the old witness violates the cut,
  /// the new one is its projection onto slightly tightened constraints;
  /// throws StructuralError when the intersection is empty.
  Polyhedron with_cut(const HalfSpace& cut, int max_iter = 100000) const;

  /// Same constraints with additional half-spaces; `witness` must satisfy all.
  Polyhedron intersect(const std::vector<HalfSpace>& extra, Point witness) const;

 private:
  Box box_;
  std::vector<HalfSpace> halfspaces_;
  Point witness_;
};

/// Nearest point of P to x in the Euclidean norm, by a dual active-set method
/// that terminates with the exact face (up to rounding).
Point euclidean_project(const Polyhedron& poly, const Point& x, const SolverSettings& settings = {});

/// The same projection by cyclic Dykstra sweeps, stopped once a sweep moves
/// neither the iterate nor the correction terms by tol and all constraints
/// hold within 10 tol.
Point dykstra_project(const Polyhedron& poly, const Point& x, const SolverSettings& settings = {});

/// Differentiable convex objective on R^d.
struct ConvexObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

struct MinimizeResult {
  Point point;
  /// |y - P(y - grad f(y))|_2, zero exactly at a constrained minimizer.
  double residual = 0.0;
  int iterations = 0;
};

/// Projected gradient descent with Barzilai-Borwein trial steps and
/// backtracking until the quadratic upper bound at the trial step holds.
MinimizeResult minimize_convex(const ConvexObjective& objective, const Polyhedron& poly,
                               const SolverSettings& settings, const Point& start);

struct ProjectionResult {
  Point point;
  /// min over sampled feasible y of <point - y, Jx - J point>; nonnegative
  /// at the exact generalized projection.
  double certificate = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Pi_P x, the minimizer of phi(., x) over P.
ProjectionResult generalized_projection(const LpSpace& space, const Polyhedron& poly, const Point& x,
                                        const SolverSettings& settings = {},
                                        const std::optional<Point>& start = std::nullopt);

/// Hit-and-run samples started at the witness. Deterministic in `seed`.
std::vector<Point> sample_feasible(const Polyhedron& poly, std::size_t count, std::uint64_t seed);

/// Vertices of P found by enumerating d-subsets of its constraints. Returns
/// an empty list when the number of subsets exceeds `max_subsets`.
std::vector<Point> enumerate_vertices(const Polyhedron& poly, std::size_t max_subsets = 200000);

/// Witness, `settings.certificate_samples` hit-and-run samples and, for
/// d <= 4, the vertices. These are the points every certificate is tested on.
std::vector<Point> certificate_points(const Polyhedron& poly, const SolverSettings& settings);

}  // namespace spm
