#include "spm/space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spm {

namespace {

void require_dim(const LpSpace& space, int dim) {
  if (dim != space.dim()) {
    throw StructuralError("dimension mismatch: expected " + std::to_string(space.dim()) + ", got " +
                          std::to_string(dim));
  }
}

// r-norm computed on coordinates scaled by the largest magnitude.
double scaled_norm(const Eigen::VectorXd& x, double r) {
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += std::pow(std::abs(x[i]) / m, r);
  return m * std::pow(sum, 1.0 / r);
}

// Duality mapping of l_r: |x|^{2-r} |x_i|^{r-1} sign(x_i).
Eigen::VectorXd power_duality(const Eigen::VectorXd& x, double r) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return out;
  if (r == 2.0) return x;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += std::pow(std::abs(x[i]) / m, r);
  const double ns = std::pow(sum, 1.0 / r);
  const double scale = m * std::pow(ns, 2.0 - r);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = x[i] / m;
    if (s != 0.0) out[i] = scale * std::copysign(std::pow(std::abs(s), r - 1.0), s);
  }
  return out;
}

double golden_min(const auto& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

// inf (or sup) of g over the set. Segments are searched on a uniform
// parameter grid, then the best cell pair is refined by golden section.
template <class G>
SetDistance extremum_over(const PointSet& set, G&& g, bool maximize, const SegmentSearch& search) {
  const double sign = maximize ? -1.0 : 1.0;
  return std::visit(
      [&](const auto& d) -> SetDistance {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PointSet::Singleton>) {
          return {g(d.v), 0.0};
        } else if constexpr (std::is_same_v<T, PointSet::FiniteList>) {
          const auto best = kernels::argmin(
              d.points.size(), [&](std::size_t i) { return sign * g(d.points[i]); }, search.exec);
          return {sign * best.value, 0.0};
        } else {
          const Eigen::VectorXd dir = d.b.coords() - d.a.coords();
          auto at = [&](double t) { return sign * g(Point(d.a.coords() + t * dir)); };
          const int n = std::max(search.grid_points, 2);
          const double h = 1.0 / (n - 1);
          const auto best = kernels::argmin(
              static_cast<std::size_t>(n),
              [&](std::size_t k) { return at(static_cast<double>(k) * h); }, search.exec);
          const double k = static_cast<double>(best.index);
          const double lo = std::max(0.0, (k - 1.0) * h);
          const double hi = std::min(1.0, (k + 1.0) * h);
          const double refined = golden_min(at, lo, hi, search.refine_tol);
          return {sign * std::min(best.value, refined), search.refine_tol};
        }
      },
      set.description());
}

bool same_set(const PointSet& a, const PointSet& b) {
  using D = std::variant<PointSet::Singleton, PointSet::Segment, PointSet::FiniteList>;
  const D& x = a.description();
  const D& y = b.description();
  if (x.index() != y.index()) return false;
  if (const auto* s = std::get_if<PointSet::Singleton>(&x)) return s->v == std::get<PointSet::Singleton>(y).v;
  if (const auto* s = std::get_if<PointSet::Segment>(&x)) {
    const auto& t = std::get<PointSet::Segment>(y);
    return (s->a == t.a && s->b == t.b) || (s->a == t.b && s->b == t.a);
  }
  return std::get<PointSet::FiniteList>(x).points == std::get<PointSet::FiniteList>(y).points;
}

}  // namespace

LpSpace::LpSpace(int dim, double p) : dim_(dim), p_(p), q_(p / (p - 1.0)) {
  if (dim < 1) throw StructuralError("dimension must be positive");
  if (!(p > 1.0) || !std::isfinite(p)) throw StructuralError("exponent p must satisfy 1 < p < inf");
}

double pairing(const Point& x, const DualPoint& xs) {
  if (x.dim() != xs.dim()) throw StructuralError("pairing of vectors with different dimensions");
  return x.coords().dot(xs.coords());
}

double norm(const LpSpace& space, const Point& x) {
  require_dim(space, x.dim());
  return scaled_norm(x.coords(), space.p());
}

double norm(const LpSpace& space, const DualPoint& x) {
  require_dim(space, x.dim());
  return scaled_norm(x.coords(), space.q());
}

DualPoint duality_map(const LpSpace& space, const Point& x) {
  require_dim(space, x.dim());
  return DualPoint(power_duality(x.coords(), space.p()));
}

Point inverse_duality_map(const LpSpace& space, const DualPoint& y) {
  require_dim(space, y.dim());
  return Point(power_duality(y.coords(), space.q()));
}

double lyapunov_phi(const LpSpace& space, const Point& x, const Point& y) {
  require_dim(space, x.dim());
  require_dim(space, y.dim());
  if (x == y) return 0.0;
  // In l_2 the functional is |x - y|^2; evaluating it that way avoids
  // cancellation between the three terms.
  if (space.is_hilbert()) return (x.coords() - y.coords()).squaredNorm();
  const double nx = norm(space, x);
  const double ny = norm(space, y);
  const double value = nx * nx - 2.0 * pairing(x, duality_map(space, y)) + ny * ny;
  return std::max(value, 0.0);
}

double norm_sq_difference(const LpSpace& space, const Point& x, const Point& y) {
  require_dim(space, x.dim());
  require_dim(space, y.dim());
  const Eigen::VectorXd& a = x.coords();
  const Eigen::VectorXd& b = y.coords();
  if (space.is_hilbert()) return (a + b).dot(a - b);
  const double m = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  if (m == 0.0) return 0.0;
  const double p = space.p();
  // |s|^p - |t|^p = |t|^p expm1(p log1p((|s| - |t|) / |t|)); |s| - |t| is exact
  // for close arguments.
  auto pow_diff = [p](double s, double t) {
    s = std::abs(s);
    t = std::abs(t);
    if (t == 0.0 || s == 0.0) return std::pow(s, p) - std::pow(t, p);
    return std::pow(t, p) * std::expm1(p * std::log1p((s - t) / t));
  };
  double sa = 0.0;
  double sb = 0.0;
  double diff = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sa += std::pow(std::abs(a[i]) / m, p);
    sb += std::pow(std::abs(b[i]) / m, p);
    diff += pow_diff(a[i] / m, b[i] / m);
  }
  const double na = std::pow(sa, 1.0 / p);
  const double nb = std::pow(sb, 1.0 / p);
  if (sb == 0.0) return m * m * na * na;
  const double norm_diff = nb * std::expm1(std::log1p(diff / sb) / p);
  return m * m * norm_diff * (na + nb);
}

PointSet PointSet::singleton(Point v) { return PointSet(Singleton{std::move(v)}); }

PointSet PointSet::segment(Point a, Point b) {
  if (a.dim() != b.dim()) throw StructuralError("segment endpoints have different dimensions");
  if (a == b) return singleton(std::move(a));
  return PointSet(Segment{std::move(a), std::move(b)});
}

PointSet PointSet::finite_list(std::vector<Point> points) {
  if (points.empty()) throw StructuralError("point set must be nonempty");
  for (const auto& v : points) {
    if (v.dim() != points.front().dim()) throw StructuralError("point list has mixed dimensions");
  }
  if (points.size() == 1) return singleton(std::move(points.front()));
  return PointSet(FiniteList{std::move(points)});
}

int PointSet::dim() const {
  return std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Singleton>) return d.v.dim();
        else if constexpr (std::is_same_v<T, Segment>) return d.a.dim();
        else return d.points.front().dim();
      },
      desc_);
}

bool PointSet::contains(const Point& z, double tol) const {
  auto close = [&](const Eigen::VectorXd& v) {
    return (z.coords() - v).lpNorm<Eigen::Infinity>() <= tol;
  };
  return std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Singleton>) {
          return close(d.v.coords());
        } else if constexpr (std::is_same_v<T, Segment>) {
          const Eigen::VectorXd dir = d.b.coords() - d.a.coords();
          const double t =
              std::clamp((z.coords() - d.a.coords()).dot(dir) / dir.squaredNorm(), 0.0, 1.0);
          return close(d.a.coords() + t * dir);
        } else {
          return std::any_of(d.points.begin(), d.points.end(),
                             [&](const Point& v) { return close(v.coords()); });
        }
      },
      desc_);
}

Point PointSet::midpoint() const {
  return std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Singleton>) return d.v;
        else if constexpr (std::is_same_v<T, Segment>) return Point(0.5 * (d.a.coords() + d.b.coords()));
        else return d.points.front();
      },
      desc_);
}

SetDistance capital_phi(const LpSpace& space, const PointSet& a, const PointSet& b,
                        const SegmentSearch& search) {
  require_dim(space, a.dim());
  require_dim(space, b.dim());
  if (same_set(a, b)) return {0.0, 0.0};
  // Inner searches run serially inside the (possibly parallel) outer one.
  SegmentSearch inner = search;
  inner.exec = kernels::Exec::serial;
  const SetDistance first = extremum_over(
      b,
      [&](const Point& q) {
        return extremum_over(a, [&](const Point& y) { return lyapunov_phi(space, y, q); }, false,
                             inner)
            .value;
      },
      true, search);
  const SetDistance second = extremum_over(
      a,
      [&](const Point& y) {
        return extremum_over(b, [&](const Point& q) { return lyapunov_phi(space, y, q); }, false,
                             inner)
            .value;
      },
      true, search);
  const bool exact = !a.is_segment() && !b.is_segment();
  return {std::max(first.value, second.value),
          exact ? 0.0 : std::max(first.resolution, second.resolution)};
}

SetDistance distance_to_set(const LpSpace& space, const Point& x, const PointSet& a,
                            const SegmentSearch& search) {
  require_dim(space, x.dim());
  require_dim(space, a.dim());
  return extremum_over(a, [&](const Point& y) { return norm(space, x - y); }, false, search);
}

SetDistance hausdorff(const LpSpace& space, const PointSet& a, const PointSet& b,
                      const SegmentSearch& search) {
  require_dim(space, a.dim());
  require_dim(space, b.dim());
  if (same_set(a, b)) return {0.0, 0.0};
  SegmentSearch inner = search;
  inner.exec = kernels::Exec::serial;
  const SetDistance ab = extremum_over(
      a, [&](const Point& x) { return distance_to_set(space, x, b, inner).value; }, true, search);
  const SetDistance ba = extremum_over(
      b, [&](const Point& y) { return distance_to_set(space, y, a, inner).value; }, true, search);
  const bool exact = !a.is_segment() && !b.is_segment();
  return {std::max(ab.value, ba.value), exact ? 0.0 : std::max(ab.resolution, ba.resolution)};
}

}  // namespace spm
