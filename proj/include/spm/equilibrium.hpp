#pragma once

// Equilibrium bifunctions (F(x, x) = 0, monotone, convex and lower
// semicontinuous in y by construction) and the
// resolvent S_r x = {z in C : F(z, y) + <y - z, Jz - Jx> / r >= 0 for all y in C}.

#include <optional>
#include <variant>

#include "spm/convex.hpp"

namespace spm {

/// F(x, y) = 0.
struct ZeroBifunction {};

/// F(x, y) = f(y) - f(x) with f(y) = <y, Qy> / 2 + <c, y>, Q symmetric PSD.
struct ConvexCost {
  Eigen::MatrixXd Q;
  DualPoint c;
};

/// F(x, y) = <Ax + b, y - x>, A monotone (A + A^T PSD).
struct MonotoneOperator {
  Eigen::MatrixXd A;
  DualPoint b;
};

class Bifunction {
 public:
  using Variant = std::variant<ZeroBifunction, ConvexCost, MonotoneOperator>;

  static Bifunction zero(int dim);
  /// Rejects non-symmetric or indefinite Q.
  static Bifunction convex_cost(Eigen::MatrixXd Q, DualPoint c);
  /// Rejects A whose symmetric part is indefinite.
  static Bifunction monotone_operator(Eigen::MatrixXd A, DualPoint b);

  int dim() const { return dim_; }
  const Variant& variant() const { return v_; }
  double operator()(const Point& x, const Point& y) const;

 private:
  Bifunction(int dim, Variant v) : dim_(dim), v_(std::move(v)) {}
  int dim_;
  Variant v_;
};

struct ResolventResult {
  Point u;
  /// min over certificate points y of F(u, y) + <y - u, Ju - Jv> / r.
  double residual = 0.0;
  int inner_iters = 0;
};

/// S_r v over C. The inner solver starts from the Euclidean projection of
/// `start` (default v). Throws CertificateFailure when the certificate
/// residual is below -10 tol.
ResolventResult resolvent(const LpSpace& space, const Polyhedron& C, const Bifunction& F, double r,
                          const Point& v, const SolverSettings& settings = {},
                          const std::optional<Point>& start = std::nullopt);

/// min over certificate points y of F(u, y); nonnegative when u solves the
/// equilibrium problem. u must be feasible within 1e-9.
double ep_residual(const Polyhedron& C, const Bifunction& F, const Point& u,
                   const SolverSettings& settings = {});

}  // namespace spm
