#include "spm/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace spm {

namespace {

void check_square(const Eigen::MatrixXd& m, int dim, const char* name) {
  if (m.rows() != dim || m.cols() != dim) {
    throw StructuralError(std::string(name) + " must be " + std::to_string(dim) + "x" + std::to_string(dim));
  }
  if (!m.allFinite()) throw StructuralError(std::string(name) + " has non-finite entries");
}

double min_sym_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double f_cost(const ConvexCost& cc, const Eigen::VectorXd& y) {
  return 0.5 * y.dot(cc.Q * y) + cc.c.coords().dot(y);
}

// Crude local Lipschitz bound of J (Euclidean norms) over the box of C.
double estimate_duality_lipschitz(const LpSpace& space, const Polyhedron& C) {
  if (space.is_hilbert()) return 1.0;
  std::mt19937_64 rng(0x11f);
  std::uniform_real_distribution<double> unit;
  const Box& box = C.bounds();
  double best = 1.0;
  Eigen::VectorXd x(space.dim());
  Eigen::VectorXd y(space.dim());
  for (int k = 0; k < 32; ++k) {
    for (int j = 0; j < space.dim(); ++j) {
      x[j] = box.lower[j] + (box.upper[j] - box.lower[j]) * unit(rng);
      y[j] = x[j] + 1e-3 * (box.upper[j] - box.lower[j]) * (unit(rng) - 0.5);
    }
    const double dx = (x - y).norm();
    if (dx == 0.0) continue;
    const double dj = (duality_map(space, Point(x)).coords() - duality_map(space, Point(y)).coords()).norm();
    best = std::max(best, dj / dx);
  }
  return best;
}

struct ViSolution {
  Eigen::VectorXd u;
  int iterations = 0;
};

// Extragradient iteration with backtracking for the strongly monotone
// variational inequality <G(u), y - u> >= 0 over C, where
// G(u) = r (A u + b) + Ju - Jv.
ViSolution solve_monotone_vi(const LpSpace& space, const Polyhedron& C, const MonotoneOperator& op,
                             double r, const DualPoint& jv, const SolverSettings& settings,
                             const Eigen::VectorXd& start) {
  auto G = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return r * (op.A * u + op.b.coords()) + duality_map(space, Point(u)).coords() - jv.coords();
  };
  auto project = [&](const Eigen::VectorXd& v) { return euclidean_project(C, Point(v), settings).coords(); };

  const double lambda_max = op.A.jacobiSvd().singularValues()[0];
  const double initial = 1.0 / (r * lambda_max + estimate_duality_lipschitz(space, C));
  double step = initial;

  Eigen::VectorXd u = project(start);
  Eigen::VectorXd gu = G(u);
  double residual = (u - project(u - gu)).norm();
  int it = 0;
  for (; it < settings.max_iter && residual > settings.tol; ++it) {
    Eigen::VectorXd ub;
    Eigen::VectorXd gb;
    bool first_trial = true;
    for (;;) {
      ub = project(u - step * gu);
      gb = G(ub);
      const double du = (u - ub).norm();
      if (du == 0.0 || step * (gu - gb).norm() <= 0.9 * du) break;
      step *= settings.ls_shrink;
      first_trial = false;
    }
    u = project(u - step * gb);
    gu = G(u);
    residual = (u - project(u - gu)).norm();
    if (first_trial) step = std::min(step / settings.ls_shrink, 1e6 * initial);
  }
  if (residual > settings.tol) {
    throw SolverFailure("monotone variational inequality did not converge", u, residual);
  }
  return {u, it};
}

}  // namespace

Bifunction Bifunction::zero(int dim) {
  if (dim < 1) throw StructuralError("dimension must be positive");
  return Bifunction(dim, ZeroBifunction{});
}

Bifunction Bifunction::convex_cost(Eigen::MatrixXd Q, DualPoint c) {
  const int dim = c.dim();
  check_square(Q, dim, "Q");
  const double scale = 1.0 + Q.cwiseAbs().maxCoeff();
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw StructuralError("Q must be symmetric");
  if (min_sym_eigenvalue(Q) < -1e-12 * scale) throw StructuralError("Q must be positive semidefinite");
  return Bifunction(dim, ConvexCost{std::move(Q), std::move(c)});
}

Bifunction Bifunction::monotone_operator(Eigen::MatrixXd A, DualPoint b) {
  const int dim = b.dim();
  check_square(A, dim, "A");
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  if (min_sym_eigenvalue(sym) < -1e-12 * scale) throw StructuralError("A must be monotone (A + A^T PSD)");
  return Bifunction(dim, MonotoneOperator{std::move(A), std::move(b)});
}

double Bifunction::operator()(const Point& x, const Point& y) const {
  if (x.dim() != dim_ || y.dim() != dim_) throw StructuralError("bifunction argument dimension mismatch");
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroBifunction>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ConvexCost>) {
          return f_cost(f, y.coords()) - f_cost(f, x.coords());
        } else {
          return (f.A * x.coords() + f.b.coords()).dot(y.coords() - x.coords());
        }
      },
      v_);
}

ResolventResult resolvent(const LpSpace& space, const Polyhedron& C, const Bifunction& F, double r,
                          const Point& v, const SolverSettings& settings,
                          const std::optional<Point>& start) {
  if (!(r > 0.0) || !std::isfinite(r)) throw StructuralError("resolvent parameter r must be positive");
  if (F.dim() != space.dim() || C.dim() != space.dim() || v.dim() != space.dim()) {
    throw StructuralError("resolvent arguments have inconsistent dimensions");
  }
  settings.validate();
  if (start && start->dim() != space.dim()) throw StructuralError("resolvent start has the wrong dimension");
  const DualPoint jv = duality_map(space, v);
  const Point init = start ? euclidean_project(C, *start, settings) : euclidean_project(C, v, settings);

  ResolventResult out{v, 0.0, 0};
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ZeroBifunction>) {
          const auto proj = generalized_projection(space, C, v, settings, init);
          out.u = proj.point;
          out.inner_iters = proj.iterations;
        } else if constexpr (std::is_same_v<T, ConvexCost>) {
          ConvexObjective objective{
              [&](const Eigen::VectorXd& y) {
                const double n = norm(space, Point(y));
                return r * f_cost(f, y) + 0.5 * n * n - y.dot(jv.coords());
              },
              [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
                return r * (f.Q * y + f.c.coords()) + duality_map(space, Point(y)).coords() - jv.coords();
              }};
          const auto min = minimize_convex(objective, C, settings, init);
          out.u = min.point;
          out.inner_iters = min.iterations;
        } else {
          const auto sol = solve_monotone_vi(space, C, f, r, jv, settings, init.coords());
          out.u = Point(sol.u);
          out.inner_iters = sol.iterations;
        }
      },
      F.variant());

  const DualPoint gap = duality_map(space, out.u) - jv;
  const auto points = certificate_points(C, settings);
  out.residual = kernels::min_value(points.size(), [&](std::size_t i) {
    return F(out.u, points[i]) + pairing(points[i] - out.u, gap) / r;
  });
  if (out.residual < -10.0 * settings.tol) {
    throw CertificateFailure("resolvent certificate violated: residual " + std::to_string(out.residual),
                             out.residual);
  }
  return out;
}

double ep_residual(const Polyhedron& C, const Bifunction& F, const Point& u, const SolverSettings& settings) {
  if (F.dim() != C.dim()) throw StructuralError("bifunction and feasible set dimensions differ");
  const double violation = C.max_violation(u);
  if (violation > 1e-9) {
    throw StructuralError("ep_residual needs a feasible point; violation " + std::to_string(violation));
  }
  const auto points = certificate_points(C, settings);
  return kernels::min_value(points.size(), [&](std::size_t i) { return F(u, points[i]); });
}

}  // namespace spm
