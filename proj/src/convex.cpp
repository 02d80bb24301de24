#include "spm/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace spm {

namespace {

void check_dim(const Polyhedron& poly, const Point& x) {
  if (x.dim() != poly.dim()) {
    throw StructuralError("dimension mismatch: polyhedron has " + std::to_string(poly.dim()) +
                          ", point has " + std::to_string(x.dim()));
  }
}

// Projection onto {z : <z, a> <= b - margin |a|}.
void project_halfspace(Eigen::VectorXd& z, const HalfSpace& h, double margin = 0.0) {
  const Eigen::VectorXd& a = h.a().coords();
  const double aa = a.squaredNorm();
  const double excess = z.dot(a) - (h.b() - margin * std::sqrt(aa));
  if (excess > 0.0) z -= (excess / aa) * a;
}

void clamp_box(Eigen::VectorXd& z, const Box& box) {
  z = z.cwiseMax(box.lower).cwiseMin(box.upper);
}

// Linear constraint <n, y> <= b.
struct Row {
  Eigen::VectorXd n;
  double b;
};

std::vector<Row> rows_of(const Box& box, const std::vector<HalfSpace>& hs, double margin = 0.0) {
  std::vector<Row> rows;
  const Eigen::Index d = box.lower.size();
  rows.reserve(hs.size() + 2 * static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    const double shrink = box.upper[j] - box.lower[j] > 4.0 * margin ? margin : 0.0;
    Eigen::VectorXd e = Eigen::VectorXd::Unit(d, j);
    rows.push_back({e, box.upper[j] - shrink});
    rows.push_back({-e, -box.lower[j] - shrink});
  }
  for (const auto& h : hs) {
    if (h.is_vacuous()) continue;
    rows.push_back({h.a().coords(), h.b() - margin * h.a().coords().norm()});
  }
  return rows;
}

// min 1/2 |y - x|^2 subject to the rows, by the dual active-set method of
// Goldfarb and Idnani specialised to the identity Hessian. Active normals stay
// linearly independent; each pass adds the most violated row, dropping active
// rows whose multipliers would turn negative. Returns nullopt when the rows
// are inconsistent.
std::optional<Eigen::VectorXd> nearest_point(const Eigen::VectorXd& x, const std::vector<Row>& rows,
                                             int max_iter) {
  const Eigen::Index d = x.size();
  Eigen::VectorXd y = x;
  std::vector<std::size_t> active;
  std::vector<double> lambda;
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();

  auto violation = [&](std::size_t i) { return (rows[i].n.dot(y) - rows[i].b) / rows[i].n.norm(); };
  auto active_matrix = [&] {
    Eigen::MatrixXd nm(d, static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) nm.col(static_cast<Eigen::Index>(k)) = rows[active[k]].n;
    return nm;
  };

  for (int it = 0; it < max_iter; ++it) {
    const double feas_tol = 1e-14 * (scale + y.cwiseAbs().maxCoeff());
    std::size_t p = rows.size();
    double worst = feas_tol;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = violation(i);
      if (v > worst) {
        worst = v;
        p = i;
      }
    }
    if (p == rows.size()) break;

    double lambda_p = 0.0;
    for (;;) {
      const Eigen::VectorXd& np = rows[p].n;
      Eigen::VectorXd z = np;
      Eigen::VectorXd r;
      if (!active.empty()) {
        const Eigen::MatrixXd nm = active_matrix();
        r = nm.colPivHouseholderQr().solve(np);
        z = np - nm * r;
      }
      double t1 = std::numeric_limits<double>::infinity();
      std::size_t block = active.size();
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (r[static_cast<Eigen::Index>(k)] > 0.0) {
          const double t = lambda[k] / r[static_cast<Eigen::Index>(k)];
          if (t < t1) {
            t1 = t;
            block = k;
          }
        }
      }
      const bool dependent = z.norm() <= 1e-11 * np.norm();
      const double excess = np.dot(y) - rows[p].b;
      const double t2 = dependent ? std::numeric_limits<double>::infinity() : excess / z.squaredNorm();
      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) return std::nullopt;
      if (!dependent) y -= t * z;
      for (std::size_t k = 0; k < active.size(); ++k) lambda[k] -= t * r[static_cast<Eigen::Index>(k)];
      lambda_p += t;
      if (t2 <= t1) {
        active.push_back(p);
        lambda.push_back(lambda_p);
        break;
      }
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(block));
      lambda.erase(lambda.begin() + static_cast<std::ptrdiff_t>(block));
      if (np.dot(y) - rows[p].b <= 0.0) break;
    }
    if (it + 1 == max_iter) {
      throw SolverFailure("active-set projection did not terminate", y, worst);
    }
  }

  // Re-solve on the final active set to remove drift from the updates.
  if (!active.empty()) {
    const Eigen::MatrixXd nm = active_matrix();
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = rows[active[k]].b;
    const Eigen::VectorXd mult =
        (nm.transpose() * nm).ldlt().solve(nm.transpose() * x - rhs);
    const Eigen::VectorXd exact = x - nm * mult;
    if (exact.allFinite() && mult.minCoeff() >= 0.0) {
      double before = 0.0;
      double after = 0.0;
      for (const auto& row : rows) {
        before = std::max(before, row.n.dot(y) - row.b);
        after = std::max(after, row.n.dot(exact) - row.b);
      }
      if (after <= before) y = exact;
    }
  }
  return y;
}

}  // namespace

HalfSpace::HalfSpace(DualPoint a, double b) : a_(std::move(a)), b_(b) {
  if (!std::isfinite(b)) throw StructuralError("half-space offset must be finite");
  if (a_.coords().isZero(0.0) && b < 0.0) throw StructuralError("half-space with a = 0, b < 0 is empty");
}

void SolverSettings::validate() const {
  if (!(tol > 0.0)) throw StructuralError("solver tol must be positive");
  if (max_iter < 1) throw StructuralError("solver max_iter must be at least 1");
  if (!(ls_shrink > 0.0 && ls_shrink < 1.0)) throw StructuralError("ls_shrink must lie in (0, 1)");
  if (certificate_samples < 0) throw StructuralError("certificate_samples must be nonnegative");
}

Polyhedron::Polyhedron(Box box, std::vector<HalfSpace> halfspaces, Point witness)
    : box_(std::move(box)), halfspaces_(std::move(halfspaces)), witness_(std::move(witness)) {
  const int d = witness_.dim();
  if (d < 1) throw StructuralError("polyhedron needs a witness of positive dimension");
  if (box_.lower.size() != d || box_.upper.size() != d) {
    throw StructuralError("box bounds do not match the witness dimension");
  }
  if (!box_.lower.allFinite() || !box_.upper.allFinite()) {
    throw StructuralError("box bounds must be finite");
  }
  if ((box_.lower.array() > box_.upper.array()).any()) throw StructuralError("box has lower > upper");
  for (const auto& h : halfspaces_) {
    if (h.dim() != d) throw StructuralError("half-space dimension does not match the polyhedron");
  }
  const double violation = max_violation(witness_);
  if (violation > kWitnessTol) {
    throw StructuralError("witness violates a constraint by " + std::to_string(violation));
  }
}

Polyhedron Polyhedron::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  Eigen::VectorXd center = 0.5 * (lower + upper);
  return Polyhedron(Box{std::move(lower), std::move(upper)}, {}, Point(std::move(center)));
}

double Polyhedron::max_violation(const Point& z) const {
  check_dim(*this, z);
  const Eigen::VectorXd& c = z.coords();
  double worst = 0.0;
  worst = std::max(worst, (box_.lower - c).maxCoeff());
  worst = std::max(worst, (c - box_.upper).maxCoeff());
  for (const auto& h : halfspaces_) worst = std::max(worst, -h.slack(z));
  return worst;
}

Polyhedron Polyhedron::intersect(const std::vector<HalfSpace>& extra, Point witness) const {
  std::vector<HalfSpace> all = halfspaces_;
  all.insert(all.end(), extra.begin(), extra.end());
  return Polyhedron(box_, std::move(all), std::move(witness));
}

Polyhedron Polyhedron::with_cut(const HalfSpace& cut, int max_iter) const {
  if (cut.dim() != dim()) throw StructuralError("cut dimension does not match the polyhedron");
  std::vector<HalfSpace> all = halfspaces_;
  all.push_back(cut);
  if (cut.slack(witness_) >= 0.0) return Polyhedron(box_, std::move(all), witness_);

  // Nearest point of the set shrunk by a small margin, so that the new
  // witness satisfies the original constraints strictly.
  const double margin = 1e-10 * (1.0 + witness_.coords().cwiseAbs().maxCoeff());
  for (double m : {margin, 0.0}) {
    const auto z = nearest_point(witness_.coords(), rows_of(box_, all, m), max_iter);
    if (!z) continue;
    Eigen::VectorXd w = *z;
    clamp_box(w, box_);
    double worst = 0.0;
    for (const auto& h : all) worst = std::max(worst, -h.slack(Point(w)));
    if (worst <= kWitnessTol) return Polyhedron(box_, std::move(all), Point(std::move(w)));
  }
  throw StructuralError("no feasible point found after adding cut; the set may be empty");
}

Point euclidean_project(const Polyhedron& poly, const Point& x, const SolverSettings& settings) {
  check_dim(poly, x);
  if (poly.halfspaces().empty()) {
    Eigen::VectorXd y = x.coords();
    clamp_box(y, poly.bounds());
    return Point(std::move(y));
  }
  if (poly.contains(x, 0.0)) return x;
  auto y = nearest_point(x.coords(), rows_of(poly.bounds(), poly.halfspaces()), settings.max_iter);
  if (!y) throw SolverFailure("projection found the constraints inconsistent", x.coords(), 0.0);
  return Point(std::move(*y));
}

Point dykstra_project(const Polyhedron& poly, const Point& x, const SolverSettings& settings) {
  check_dim(poly, x);
  const auto& hs = poly.halfspaces();
  const Box& box = poly.bounds();
  const Eigen::Index d = x.dim();
  std::vector<Eigen::VectorXd> incr(hs.size() + 1, Eigen::VectorXd::Zero(d));
  Eigen::VectorXd y = x.coords();
  Eigen::VectorXd z(d);
  double moved = 0.0;
  for (int sweep = 0; sweep < settings.max_iter; ++sweep) {
    const Eigen::VectorXd prev = y;
    // The iterate can stall for a sweep while the corrections still change,
    // so their movement is part of the stopping test.
    double shifted = 0.0;
    auto update = [&](std::size_t j, auto&& project) {
      z = y + incr[j];
      y = z;
      project(y);
      const Eigen::VectorXd next = z - y;
      shifted += (next - incr[j]).squaredNorm();
      incr[j] = next;
    };
    for (std::size_t j = 0; j < hs.size(); ++j) {
      if (!hs[j].is_vacuous()) update(j, [&](Eigen::VectorXd& v) { project_halfspace(v, hs[j]); });
    }
    update(hs.size(), [&](Eigen::VectorXd& v) { clamp_box(v, box); });
    moved = std::max((y - prev).norm(), std::sqrt(shifted));
    if (moved < settings.tol && poly.max_violation(Point(y)) <= 10.0 * settings.tol) return Point(std::move(y));
  }
  throw SolverFailure("Dykstra projection did not converge", y, moved);
}

MinimizeResult minimize_convex(const ConvexObjective& objective, const Polyhedron& poly,
                               const SolverSettings& settings, const Point& start) {
  settings.validate();
  check_dim(poly, start);
  auto project = [&](const Eigen::VectorXd& v) { return euclidean_project(poly, Point(v), settings).coords(); };

  Eigen::VectorXd y = poly.contains(start, 10.0 * settings.tol) ? start.coords() : project(start.coords());
  Eigen::VectorXd g = objective.gradient(y);
  double f = objective.value(y);
  double residual = (y - project(y - g)).norm();
  double step = 1.0;
  int it = 0;
  for (; it < settings.max_iter && residual > settings.tol; ++it) {
    Eigen::VectorXd y_new;
    double f_new = 0.0;
    for (;;) {
      y_new = project(y - step * g);
      const Eigen::VectorXd dy = y_new - y;
      f_new = objective.value(y_new);
      const double model = f + g.dot(dy) + dy.squaredNorm() / (2.0 * step);
      const double slack = 1e-14 * (1.0 + std::abs(f));
      if (f_new <= model + slack || dy.squaredNorm() == 0.0) break;
      step *= settings.ls_shrink;
      if (step < 1e-300) break;
    }
    const Eigen::VectorXd dy = y_new - y;
    if (dy.squaredNorm() == 0.0) {
      // The projected step no longer moves: stationary to working precision.
      residual = (y - project(y - g)).norm();
      break;
    }
    const Eigen::VectorXd g_new = objective.gradient(y_new);
    const Eigen::VectorXd dg = g_new - g;
    y = std::move(y_new);
    g = g_new;
    f = f_new;
    residual = (y - project(y - g)).norm();
    const double curvature = dy.dot(dg);
    step = curvature > 0.0 ? dy.squaredNorm() / curvature : step / settings.ls_shrink;
    step = std::clamp(step, 1e-12, 1e12);
  }
  if (residual > settings.tol) {
    throw SolverFailure("projected gradient did not reach tolerance in " + std::to_string(it) +
                            " iterations",
                        y, residual);
  }
  return {Point(std::move(y)), residual, it};
}

ProjectionResult generalized_projection(const LpSpace& space, const Polyhedron& poly, const Point& x,
                                        const SolverSettings& settings,
                                        const std::optional<Point>& start) {
  check_dim(poly, x);
  if (space.dim() != poly.dim()) throw StructuralError("space and polyhedron dimensions differ");
  const DualPoint jx = duality_map(space, x);

  MinimizeResult min;
  if (poly.contains(x, 0.0)) {
    min = {x, 0.0, 0};
  } else {
    ConvexObjective objective{
        [&](const Eigen::VectorXd& y) {
          const double n = norm(space, Point(y));
          return n * n - 2.0 * y.dot(jx.coords());
        },
        [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
          return 2.0 * (duality_map(space, Point(y)).coords() - jx.coords());
        }};
    const Point init = start ? *start : euclidean_project(poly, x, settings);
    min = minimize_convex(objective, poly, settings, init);
  }

  const Point& x0 = min.point;
  const DualPoint gap = jx - duality_map(space, x0);
  const auto points = certificate_points(poly, settings);
  const double certificate = kernels::min_value(
      points.size(), [&](std::size_t i) { return pairing(x0 - points[i], gap); });
  return {x0, certificate, min.residual, min.iterations};
}

std::vector<Point> sample_feasible(const Polyhedron& poly, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const Box& box = poly.bounds();
  const int d = poly.dim();
  Eigen::VectorXd cur = poly.witness().coords();
  std::vector<Point> out;
  out.reserve(count);
  Eigen::VectorXd dir(d);
  while (out.size() < count) {
    for (int j = 0; j < d; ++j) dir[j] = normal(rng);
    if (dir.norm() == 0.0) continue;
    dir.normalize();
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j) {
      if (dir[j] > 0.0) {
        hi = std::min(hi, std::max(box.upper[j] - cur[j], 0.0) / dir[j]);
        lo = std::max(lo, std::min(box.lower[j] - cur[j], 0.0) / dir[j]);
      } else if (dir[j] < 0.0) {
        hi = std::min(hi, std::min(box.lower[j] - cur[j], 0.0) / dir[j]);
        lo = std::max(lo, std::max(box.upper[j] - cur[j], 0.0) / dir[j]);
      }
    }
    for (const auto& h : poly.halfspaces()) {
      const double ad = h.a().coords().dot(dir);
      const double s = std::max(h.b() - h.a().coords().dot(cur), 0.0);
      if (ad > 0.0) hi = std::min(hi, s / ad);
      else if (ad < 0.0) lo = std::max(lo, s / ad);
    }
    const double t = lo + (hi - lo) * unit(rng);
    Eigen::VectorXd next = cur + t * dir;
    if (poly.max_violation(Point(next)) > kWitnessTol) next = cur;
    cur = next;
    out.emplace_back(cur);
  }
  return out;
}

std::vector<Point> enumerate_vertices(const Polyhedron& poly, std::size_t max_subsets) {
  const int d = poly.dim();
  const Box& box = poly.bounds();
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (int j = 0; j < d; ++j) {
    rows.push_back(Eigen::VectorXd::Unit(d, j));
    rhs.push_back(box.upper[j]);
    rows.push_back(-Eigen::VectorXd::Unit(d, j));
    rhs.push_back(-box.lower[j]);
  }
  for (const auto& h : poly.halfspaces()) {
    if (h.is_vacuous()) continue;
    rows.push_back(h.a().coords());
    rhs.push_back(h.b());
  }
  const std::size_t m = rows.size();
  // Number of d-subsets, saturating at max_subsets + 1.
  double subsets = 1.0;
  for (int k = 0; k < d; ++k) subsets = subsets * static_cast<double>(m - k) / (k + 1);
  if (subsets > static_cast<double>(max_subsets)) return {};

  std::vector<Point> out;
  std::vector<std::size_t> pick(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) pick[k] = static_cast<std::size_t>(k);
  Eigen::MatrixXd a(d, d);
  Eigen::VectorXd b(d);
  const double scale = 1.0 + std::max(box.lower.cwiseAbs().maxCoeff(), box.upper.cwiseAbs().maxCoeff());
  for (;;) {
    for (int r = 0; r < d; ++r) {
      a.row(r) = rows[pick[r]].transpose();
      b[r] = rhs[pick[r]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible()) {
      const Eigen::VectorXd v = lu.solve(b);
      if (v.allFinite()) {
        Point p(v);
        if (poly.max_violation(p) <= 1e-9 * scale) {
          const bool dup = std::any_of(out.begin(), out.end(), [&](const Point& o) {
            return (o.coords() - v).lpNorm<Eigen::Infinity>() <= 1e-12 * scale;
          });
          if (!dup) out.push_back(std::move(p));
        }
      }
    }
    int k = d - 1;
    while (k >= 0 && pick[k] == m - static_cast<std::size_t>(d - k)) --k;
    if (k < 0) break;
    ++pick[k];
    for (int r = k + 1; r < d; ++r) pick[r] = pick[r - 1] + 1;
  }
  return out;
}

std::vector<Point> certificate_points(const Polyhedron& poly, const SolverSettings& settings) {
  std::vector<Point> points{poly.witness()};
  auto samples = sample_feasible(poly, static_cast<std::size_t>(settings.certificate_samples), settings.seed);
  points.insert(points.end(), std::make_move_iterator(samples.begin()), std::make_move_iterator(samples.end()));
  if (poly.dim() <= 4) {
    auto verts = enumerate_vertices(poly, 5000);
    points.insert(points.end(), std::make_move_iterator(verts.begin()), std::make_move_iterator(verts.end()));
  }
  return points;
}

}  // namespace spm
