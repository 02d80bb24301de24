#include "spm/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace spm {

namespace {

Point reference_point(const MultivaluedMap& map) {
  return std::visit(
      [](const auto& m) -> Point {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SegmentContraction>) return m.center;
        else if constexpr (std::is_same_v<T, ProjectionMap>) return m.K.witness();
        else return m.fixed_point;
      },
      map.variant());
}

double affine_violation(const LpSpace& space, const SingleValuedAffine& m, const Point& x) {
  const Point tx(m.M * x.coords() + m.t.coords());
  const Point& p = m.fixed_point;
  return std::max(lyapunov_phi(space, tx, p) - lyapunov_phi(space, x, p),
                  lyapunov_phi(space, p, tx) - lyapunov_phi(space, p, x));
}

}  // namespace

MultivaluedMap MultivaluedMap::segment_contraction(Point center, double beta, SelectFrom select) {
  if (!(beta > 0.0 && beta <= 1.0)) throw StructuralError("segment contraction needs beta in (0, 1]");
  return MultivaluedMap(SegmentContraction{std::move(center), beta}, select);
}

MultivaluedMap MultivaluedMap::segment_contraction_unchecked(Point center, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw StructuralError("beta must be positive");
  return MultivaluedMap(SegmentContraction{std::move(center), beta}, SelectFrom::PT);
}

MultivaluedMap MultivaluedMap::projection(Polyhedron K, SelectFrom select) {
  return MultivaluedMap(ProjectionMap{std::move(K)}, select);
}

MultivaluedMap MultivaluedMap::affine(const LpSpace& space, Eigen::MatrixXd M, Point t, Point fixed_point,
                                      int samples, std::uint64_t seed) {
  const int d = space.dim();
  if (M.rows() != d || M.cols() != d || t.dim() != d || fixed_point.dim() != d) {
    throw StructuralError("affine map dimensions do not match the space");
  }
  if (!M.allFinite()) throw StructuralError("affine map matrix has non-finite entries");
  const Eigen::VectorXd image = M * fixed_point.coords() + t.coords();
  const double scale = 1.0 + fixed_point.coords().cwiseAbs().maxCoeff();
  if ((image - fixed_point.coords()).lpNorm<Eigen::Infinity>() > 1e-12 * scale) {
    throw StructuralError("registered point is not fixed by the affine map");
  }
  SingleValuedAffine m{std::move(M), std::move(t), std::move(fixed_point)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-10.0, 10.0);
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd x = m.fixed_point.coords();
    for (int j = 0; j < d; ++j) x[j] += unit(rng);
    const double v = affine_violation(space, m, Point(x));
    if (v > 1e-9) {
      throw StructuralError("affine map fails the phi-contraction check toward its fixed point (excess " +
                            std::to_string(v) + ")");
    }
  }
  return MultivaluedMap(std::move(m), SelectFrom::PT);
}

int MultivaluedMap::dim() const { return reference_point(*this).dim(); }

FixedSet MultivaluedMap::fixed_set() const {
  if (const auto* pm = std::get_if<ProjectionMap>(&v_)) return pm->K;
  return reference_point(*this);
}

PointSet image(const LpSpace& space, const MultivaluedMap& map, const Point& x, const SolverSettings& settings) {
  if (x.dim() != space.dim() || map.dim() != space.dim()) throw StructuralError("map dimension mismatch");
  return std::visit(
      [&](const auto& m) -> PointSet {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SegmentContraction>) {
          return PointSet::segment(m.center, m.center + m.beta * (x - m.center));
        } else if constexpr (std::is_same_v<T, ProjectionMap>) {
          return PointSet::singleton(generalized_projection(space, m.K, x, settings).point);
        } else {
          return PointSet::singleton(Point(m.M * x.coords() + m.t.coords()));
        }
      },
      map.variant());
}

Selection evaluate_PT(const LpSpace& space, const MultivaluedMap& map, const Point& x,
                      const SolverSettings& settings) {
  if (const auto* sc = std::get_if<SegmentContraction>(&map.variant())) {
    if (x.dim() != space.dim() || sc->center.dim() != space.dim()) throw StructuralError("map dimension mismatch");
    // Points center + t (x - center), t in [0, beta], sit at distance
    // (1 - t)|x - center| from x.
    return {sc->center + sc->beta * (x - sc->center)};
  }
  const PointSet img = image(space, map, x, settings);
  return {std::get<PointSet::Singleton>(img.description()).v};
}

Selection select(const LpSpace& space, const MultivaluedMap& map, const Point& x, const SolverSettings& settings) {
  if (map.select_from() == SelectFrom::PT) return evaluate_PT(space, map, x, settings);
  return {image(space, map, x, settings).midpoint()};
}

RqneReport check_rqne(const LpSpace& space, const MultivaluedMap& map, int samples, std::uint64_t seed,
                      const SolverSettings& settings, double radius) {
  if (samples < 1) throw StructuralError("samples must be ≥ 1");
  const int d = space.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-radius, radius);
  const Point ref = reference_point(map);

  std::vector<Point> xs;
  xs.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd x = ref.coords();
    for (int j = 0; j < d; ++j) x[j] += unit(rng);
    xs.emplace_back(std::move(x));
  }
  const FixedSet fixed = map.fixed_set();
  std::vector<Point> ps;
  if (const auto* K = std::get_if<Polyhedron>(&fixed)) {
    ps = sample_feasible(*K, static_cast<std::size_t>(samples), rng());
  } else {
    ps.assign(static_cast<std::size_t>(samples), std::get<Point>(fixed));
  }

  std::vector<double> forward(xs.size());
  std::vector<double> backward(xs.size());
  kernels::for_each_index(xs.size(), [&](std::size_t i) {
    const auto tx = PointSet::singleton(evaluate_PT(space, map, xs[i], settings).z);
    const auto tp = PointSet::singleton(evaluate_PT(space, map, ps[i], settings).z);
    forward[i] = capital_phi(space, tx, tp).value - lyapunov_phi(space, xs[i], ps[i]);
    backward[i] = capital_phi(space, tp, tx).value - lyapunov_phi(space, ps[i], xs[i]);
  });

  RqneReport report;
  const auto worst = kernels::argmax(forward.size(), [&](std::size_t i) { return forward[i]; },
                                     kernels::Exec::serial);
  report.max_violation = worst.value;
  if (worst.value > 0.0) report.witness = xs[worst.index];
  report.max_violation_fixed_first =
      kernels::max_value(backward.size(), [&](std::size_t i) { return backward[i]; }, kernels::Exec::serial);
  return report;
}

}  // namespace spm
