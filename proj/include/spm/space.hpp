#pragma once

// Geometry of the finite-dimensional spaces l_p^d, 1 < p < inf: norms, the
// normalized duality mapping J and its inverse, the Lyapunov functional
// phi(x, y) = |x|^2 - 2<x, Jy> + |y|^2, and set-valued distances between
// images of multivalued maps.

#include <initializer_list>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "spm/errors.hpp"
#include "spm/kernels.hpp"

namespace spm {

/// The space l_p^dim. The dual exponent q = p / (p - 1) is always derived.
class LpSpace {
 public:
  LpSpace(int dim, double p);

  int dim() const { return dim_; }
  double p() const { return p_; }
  double q() const { return q_; }
  bool is_hilbert() const { return p_ == 2.0; }

 private:
  int dim_;
  double p_;
  double q_;
};

enum class Kind { primal, dual };

/// Coordinates tagged with the space they live in, so that an element of E
/// can only be paired with an element of E*.
template <Kind K>
class Vec {
 public:
  Vec() = default;
  explicit Vec(Eigen::VectorXd coords) : coords_(std::move(coords)) {
    if (!coords_.allFinite()) throw StructuralError("vector has non-finite coordinates");
  }
  Vec(std::initializer_list<double> values)
      : Vec(Eigen::Map<const Eigen::VectorXd>(values.begin(),
                                              static_cast<Eigen::Index>(values.size()))) {}

  static Vec zero(int dim) { return Vec(Eigen::VectorXd::Zero(dim)); }

  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[i]; }
  const Eigen::VectorXd& coords() const { return coords_; }

  Vec& operator+=(const Vec& o) {
    coords_ += o.coords_;
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    coords_ -= o.coords_;
    return *this;
  }
  Vec& operator*=(double s) {
    coords_ *= s;
    return *this;
  }
  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend bool operator==(const Vec& a, const Vec& b) { return a.coords_ == b.coords_; }

 private:
  Eigen::VectorXd coords_;
};

using Point = Vec<Kind::primal>;
using DualPoint = Vec<Kind::dual>;

/// Duality pairing <x, x*> between E and E*.
double pairing(const Point& x, const DualPoint& xs);

/// p-norm of a primal vector.
double norm(const LpSpace& space, const Point& x);
/// q-norm of a dual vector.
double norm(const LpSpace& space, const DualPoint& x);

/// Jx = |x|_p^{2-p} (|x_i|^{p-1} sign x_i)_i, the gradient of |x|^2 / 2.
DualPoint duality_map(const LpSpace& space, const Point& x);

/// J^{-1}, i.e. the duality mapping of l_q applied to a dual vector.
Point inverse_duality_map(const LpSpace& space, const DualPoint& y);

/// phi(x, y) = |x|^2 - 2<x, Jy> + |y|^2. Clamped at zero against rounding.
double lyapunov_phi(const LpSpace& space, const Point& x, const Point& y);

/// |x|^2 - |y|^2 without the cancellation of subtracting the two squares,
/// accurate to a few ulps of the result even when x and y are close.
double norm_sq_difference(const LpSpace& space, const Point& x, const Point& y);

/// Nonempty point set: a singleton, a segment [a, b] or a finite list.
class PointSet {
 public:
  struct Singleton {
    Point v;
  };
  struct Segment {
    Point a;
    Point b;
  };
  struct FiniteList {
    std::vector<Point> points;
  };

  static PointSet singleton(Point v);
  /// Degenerates to a singleton when a == b.
  static PointSet segment(Point a, Point b);
  static PointSet finite_list(std::vector<Point> points);

  const std::variant<Singleton, Segment, FiniteList>& description() const { return desc_; }
  bool is_singleton() const { return std::holds_alternative<Singleton>(desc_); }
  bool is_segment() const { return std::holds_alternative<Segment>(desc_); }
  int dim() const;

  /// True when z lies in the set within tol (max-norm).
  bool contains(const Point& z, double tol) const;
  /// Segment midpoint, the singleton itself, or the first list element.
  Point midpoint() const;

 private:
  explicit PointSet(std::variant<Singleton, Segment, FiniteList> d) : desc_(std::move(d)) {}
  std::variant<Singleton, Segment, FiniteList> desc_;
};

/// Value of a sup/inf evaluation together with the parameter resolution that
/// bounds its accuracy. Resolution is 0 when only finite sets were involved.
struct SetDistance {
  double value = 0.0;
  double resolution = 0.0;
};

/// Grid resolution and refinement tolerance for sup/inf over segments.
struct SegmentSearch {
  int grid_points = 1024;
  double refine_tol = 1e-8;
  kernels::Exec exec = kernels::Exec::parallel;
};

/// Phi(A, B) = max{ sup_{q in B} inf_{y in A} phi(y, q), sup_{y in A} inf_{q in B} phi(y, q) }.
SetDistance capital_phi(const LpSpace& space, const PointSet& a, const PointSet& b,
                        const SegmentSearch& search = {});

/// Hausdorff distance in the p-norm. Both this and capital_phi return exactly
/// 0 for identical sets.
SetDistance hausdorff(const LpSpace& space, const PointSet& a, const PointSet& b,
                      const SegmentSearch& search = {});

/// dist(x, A) in the p-norm.
SetDistance distance_to_set(const LpSpace& space, const Point& x, const PointSet& a,
                            const SegmentSearch& search = {});

}  // namespace spm
