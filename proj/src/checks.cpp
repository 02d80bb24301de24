#include "spm/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "spm/equilibrium.hpp"
#include "spm/mappings.hpp"
#include "spm/scenarios.hpp"

namespace spm {

namespace {

using Rng = std::mt19937_64;

constexpr double kExponents[] = {1.5, 2.0, 3.0, 4.0};

Rng instance_rng(std::uint64_t seed, std::size_t i, std::uint32_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), salt};
  return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

Eigen::VectorXd random_vector(Rng& rng, int d, double half_width) {
  Eigen::VectorXd v(d);
  for (int j = 0; j < d; ++j) v[j] = uniform(rng, -half_width, half_width);
  return v;
}

std::string fmt(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (Eigen::Index j = 0; j < v.size(); ++j) os << (j ? ", " : "") << v[j];
  os << ")";
  return os.str();
}

// Per-instance margins of one check; the check passes when every margin is
// nonnegative and no instance raised.
class Tally {
 public:
  Tally(std::string name, std::size_t n)
      : name_(std::move(name)), margin_(n, std::numeric_limits<double>::infinity()), detail_(n) {}

  void add(std::size_t i, double margin, const std::string& detail = {}) {
    if (margin < margin_[i]) {
      margin_[i] = margin;
      if (margin < 0.0) detail_[i] = detail;
    }
  }
  void fail(std::size_t i, const std::string& error) {
    margin_[i] = -std::numeric_limits<double>::infinity();
    detail_[i] = error;
  }

  CheckResult result() const {
    CheckResult c{name_, true, std::numeric_limits<double>::infinity(), ""};
    for (std::size_t i = 0; i < margin_.size(); ++i) {
      c.worst = std::min(c.worst, margin_[i]);
      if (margin_[i] < 0.0 && c.passed) {
        c.passed = false;
        c.detail = "instance " + std::to_string(i) + (detail_[i].empty() ? "" : ": " + detail_[i]);
      }
    }
    if (std::isinf(c.worst) && c.worst > 0.0) c.worst = 0.0;
    return c;
  }

 private:
  std::string name_;
  std::vector<double> margin_;
  std::vector<std::string> detail_;
};

// Bounded polyhedron in [-3, 3]^d with up to three random half-spaces, all
// passing near a random witness.
Polyhedron random_polyhedron(Rng& rng, int d) {
  Eigen::VectorXd lower(d);
  Eigen::VectorXd upper(d);
  for (int j = 0; j < d; ++j) {
    lower[j] = uniform(rng, -3.0, -0.5);
    upper[j] = uniform(rng, 0.5, 3.0);
  }
  Eigen::VectorXd w(d);
  for (int j = 0; j < d; ++j) w[j] = uniform(rng, 0.5 * lower[j], 0.5 * upper[j]);
  std::normal_distribution<double> gauss;
  std::vector<HalfSpace> hs;
  const int k = pick(rng, 4);
  for (int h = 0; h < k; ++h) {
    Eigen::VectorXd a(d);
    for (int j = 0; j < d; ++j) a[j] = gauss(rng);
    if (a.norm() < 1e-3) a[0] = 1.0;
    hs.emplace_back(DualPoint(a), a.dot(w) + uniform(rng, 0.0, 0.5) * a.norm());
  }
  return Polyhedron(Box{lower, upper}, std::move(hs), Point(w));
}

int random_dim(Rng& rng) { return 1 + pick(rng, 3); }
double random_exponent(Rng& rng) { return kExponents[pick(rng, 4)]; }

void require_samples(const CheckOptions& options) {
  if (options.samples < 1) throw StructuralError("samples must be ≥ 1");
}

template <class Body>
void for_instances(const CheckOptions& options, std::size_t n, Body&& body) {
  kernels::for_each_index(n, body, options.exec);
}

// ---------------------------------------------------------------- space

PointSet random_point_set(Rng& rng, int d, bool allow_segment) {
  const int kind = pick(rng, allow_segment ? 3 : 2);
  if (kind == 0) return PointSet::singleton(Point(random_vector(rng, d, 3.0)));
  if (kind == 1) {
    std::vector<Point> pts;
    for (int k = 0; k < 3; ++k) pts.emplace_back(random_vector(rng, d, 3.0));
    return PointSet::finite_list(std::move(pts));
  }
  return PointSet::segment(Point(random_vector(rng, d, 3.0)), Point(random_vector(rng, d, 3.0)));
}

}  // namespace

Report check_space(const CheckOptions& options) {
  require_samples(options);
  const auto n = static_cast<std::size_t>(options.samples);
  Tally bounds("phi_bounds", n);
  Tally zero("phi_zero_iff_equal", n);
  Tally pairing_norm("duality_pairing_and_norm", n);
  Tally inverse("inverse_duality_roundtrip", n);
  Tally fd("duality_finite_difference", n);
  Tally convexity("norm_square_convexity", n);
  const std::size_t n_sets = std::min<std::size_t>(n, 100);
  Tally phi_h("capital_phi_equals_hausdorff_sq_p2", n_sets);

  for_instances(options, n, [&](std::size_t i) {
    Rng rng = instance_rng(options.seed, i, 11);
    const int dims[] = {1, 2, 3, 5};
    const int d = dims[pick(rng, 4)];
    const double p = pick(rng, 2) == 0 ? random_exponent(rng) : uniform(rng, 1.1, 6.0);
    const LpSpace space(d, p);
    const double scale = std::pow(10.0, uniform(rng, -2.0, 2.0));
    const Point x(scale * random_vector(rng, d, 1.0));
    const Point y(scale * random_vector(rng, d, 1.0));
    const double nx = norm(space, x);
    const double ny = norm(space, y);

    const double phi = lyapunov_phi(space, x, y);
    const double hi = (nx + ny) * (nx + ny);
    const double lo = (nx - ny) * (nx - ny);
    const double slack = 1e-12 * hi;
    bounds.add(i, std::min(phi - lo, hi - phi) + slack, "phi outside [(|y|-|x|)^2, (|y|+|x|)^2]");

    const double self = lyapunov_phi(space, x, x);
    zero.add(i, self == 0.0 ? 0.0 : -self, "phi(x, x) != 0");
    if (!(x == y)) zero.add(i, phi > 0.0 ? phi : -1.0, "phi(x, y) = 0 for x != y");

    const DualPoint jx = duality_map(space, x);
    const double n2 = nx * nx;
    const double rel_pair = std::abs(pairing(x, jx) - n2) / std::max(n2, 1e-300);
    const double rel_norm = std::abs(norm(space, jx) - nx) / std::max(nx, 1e-300);
    pairing_norm.add(i, 1e-10 - std::max(rel_pair, rel_norm), "relative error above 1e-10");

    const Point back = inverse_duality_map(space, jx);
    inverse.add(i, 1e-10 - norm(space, back - x) / std::max(nx, 1e-300), "J^{-1} J x != x");

    // Central differences of |x|^2 / 2 at points with all |x_i| >= 1e-3.
    Eigen::VectorXd z = random_vector(rng, d, 3.0);
    for (int j = 0; j < d; ++j) {
      if (std::abs(z[j]) < 1e-3) z[j] = std::copysign(1e-3 + std::abs(z[j]), z[j] == 0.0 ? 1.0 : z[j]);
    }
    const double h = 1e-6;
    auto half_sq = [&](const Eigen::VectorXd& v) {
      const double nv = norm(space, Point(v));
      return 0.5 * nv * nv;
    };
    Eigen::VectorXd grad(d);
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd a = z;
      Eigen::VectorXd b = z;
      a[j] += h;
      b[j] -= h;
      grad[j] = (half_sq(a) - half_sq(b)) / (2.0 * h);
    }
    const Eigen::VectorXd jz = duality_map(space, Point(z)).coords();
    fd.add(i, h * (1.0 + z.norm()) - (grad - jz).lpNorm<Eigen::Infinity>(), "J differs from the gradient");

    // |sum a_i x_i|^2 <= sum a_i |x_i|^2.
    std::vector<Point> pts;
    std::vector<double> w;
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      pts.emplace_back(scale * random_vector(rng, d, 1.0));
      w.push_back(uniform(rng, 0.0, 1.0));
      total += w.back();
    }
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(d);
    double rhs = 0.0;
    for (int k = 0; k < 4; ++k) {
      mix += (w[k] / total) * pts[k].coords();
      const double nk = norm(space, pts[k]);
      rhs += (w[k] / total) * nk * nk;
    }
    const double lhs = std::pow(norm(space, Point(mix)), 2.0);
    convexity.add(i, rhs - lhs + 1e-12 * rhs, "convexity of |.|^2 violated");

    if (i < n_sets) {
      const LpSpace hilbert(d, 2.0);
      const bool both_segments = i % 20 == 0;
      const PointSet a = both_segments ? PointSet::segment(Point(random_vector(rng, d, 3.0)),
                                                           Point(random_vector(rng, d, 3.0)))
                                       : random_point_set(rng, d, true);
      const PointSet b = both_segments ? PointSet::segment(Point(random_vector(rng, d, 3.0)),
                                                           Point(random_vector(rng, d, 3.0)))
                                       : random_point_set(rng, d, !a.is_segment());
      SegmentSearch serial;
      serial.exec = kernels::Exec::serial;
      const SetDistance cp = capital_phi(hilbert, a, b, serial);
      const SetDistance hd = hausdorff(hilbert, a, b, serial);
      const double tol = 1e-6 * (1.0 + hd.value * hd.value);
      phi_h.add(i, tol - std::abs(cp.value - hd.value * hd.value), "Phi != H^2");
    }
  });

  Report report;
  for (const Tally* t : {&bounds, &zero, &pairing_norm, &inverse, &fd, &convexity, &phi_h}) {
    report.checks.push_back(t->result());
  }
  return report;
}

Report check_convex(const CheckOptions& options) {
  require_samples(options);
  const auto n = static_cast<std::size_t>(options.samples);
  const SolverSettings& settings = options.settings;
  const double bound = 10.0 * settings.tol;
  Tally certificate("projection_certificate", n);
  Tally three_point("three_point_inequality", n);
  Tally idempotent("projection_idempotent", n);
  Tally p2("p2_matches_euclidean", n);
  Tally dykstra("active_set_matches_dykstra", n);

  for_instances(options, n, [&](std::size_t i) {
    Rng rng = instance_rng(options.seed, i, 23);
    const int d = random_dim(rng);
    const LpSpace space(d, random_exponent(rng));
    const Polyhedron poly = random_polyhedron(rng, d);
    const Point x(random_vector(rng, d, 6.0));
    const auto ys = sample_feasible(poly, 100, rng());
    try {
      const ProjectionResult proj = generalized_projection(space, poly, x, settings);
      const Point& x0 = proj.point;
      const DualPoint gap = duality_map(space, x) - duality_map(space, x0);
      const double phi_x0x = lyapunov_phi(space, x0, x);
      for (const Point& y : ys) {
        certificate.add(i, pairing(x0 - y, gap) + bound, "<x0 - y, Jx - Jx0> < -10 tol");
        three_point.add(i, lyapunov_phi(space, y, x) + bound - lyapunov_phi(space, y, x0) - phi_x0x,
                        "three-point inequality violated");
      }
      const Point again = generalized_projection(space, poly, x0, settings).point;
      idempotent.add(i, bound - norm(space, again - x0), "Pi(Pi x) != Pi x");
    } catch (const Error& e) {
      certificate.fail(i, e.what());
      three_point.fail(i, e.what());
      idempotent.fail(i, e.what());
    }
    try {
      const LpSpace hilbert(d, 2.0);
      const Point g = generalized_projection(hilbert, poly, x, settings).point;
      const Point e = euclidean_project(poly, x, settings);
      p2.add(i, bound - (g.coords() - e.coords()).norm(), "generalized and Euclidean projections differ");
      SolverSettings tight = settings;
      tight.tol = 1e-13;
      tight.max_iter = 1000000;
      const Point dk = dykstra_project(poly, x, tight);
      dykstra.add(i, bound - (dk.coords() - e.coords()).norm(), "Dykstra and active-set projections differ");
    } catch (const Error& e) {
      p2.fail(i, e.what());
      dykstra.fail(i, e.what());
    }
  });

  Report report;
  for (const Tally* t : {&certificate, &three_point, &idempotent, &p2, &dykstra}) report.checks.push_back(t->result());
  return report;
}

namespace {

struct EquilibriumInstance {
  LpSpace space;
  Polyhedron C;
  Bifunction F;
  double r;
  /// A point of EP(F), built into the data.
  Point q;
};

// Random bifunction whose data put a chosen feasible q in EP(F): c = -Qq for
// a convex cost, b = -Aq for a monotone operator.
EquilibriumInstance random_equilibrium(Rng& rng) {
  const int d = random_dim(rng);
  const LpSpace space(d, random_exponent(rng));
  Polyhedron C = random_polyhedron(rng, d);
  const Point q = sample_feasible(C, 1, rng()).front();
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd B(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) B(a, b) = gauss(rng);
  }
  const int kind = pick(rng, 3);
  const double r = uniform(rng, 0.5, 2.0);
  if (kind == 0) return {space, std::move(C), Bifunction::zero(d), r, q};
  if (kind == 1) {
    const Eigen::MatrixXd Q = B.transpose() * B / d;
    return {space, std::move(C), Bifunction::convex_cost(Q, DualPoint(-Q * q.coords())), r, q};
  }
  Eigen::MatrixXd K(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) K(a, b) = gauss(rng);
  }
  const Eigen::MatrixXd A = B.transpose() * B / d + (K - K.transpose()) / 2.0;
  return {space, std::move(C), Bifunction::monotone_operator(A, DualPoint(-A * q.coords())), r, q};
}

}  // namespace

Report check_equilibrium(const CheckOptions& options) {
  require_samples(options);
  const auto n = static_cast<std::size_t>(options.samples);
  const SolverSettings& settings = options.settings;
  const double tol = settings.tol;
  Tally a1("F_xx_zero", n);
  Tally a2("F_monotone", n);
  Tally firm("firmly_nonexpansive_type", n);
  Tally single("single_valued", n);
  Tally inequality("resolvent_inequality", n);
  Tally fixed("fixed_points_are_equilibria", n);

  for_instances(options, n, [&](std::size_t i) {
    Rng rng = instance_rng(options.seed, i, 37);
    const EquilibriumInstance inst = random_equilibrium(rng);
    const LpSpace& space = inst.space;
    const int d = space.dim();
    const Point x(random_vector(rng, d, 5.0));
    const Point y(random_vector(rng, d, 5.0));
    const Point fx = sample_feasible(inst.C, 1, rng()).front();
    const Point fy = sample_feasible(inst.C, 1, rng()).front();

    a1.add(i, inst.F(fx, fx) == 0.0 ? 0.0 : -std::abs(inst.F(fx, fx)), "F(x, x) != 0");
    const double scale = 1.0 + fx.coords().squaredNorm() + fy.coords().squaredNorm();
    a2.add(i, 1e-12 * scale - (inst.F(fx, fy) + inst.F(fy, fx)), "F(x, y) + F(y, x) > 0");

    try {
      const Point sx = resolvent(space, inst.C, inst.F, inst.r, x, settings).u;
      const Point sy = resolvent(space, inst.C, inst.F, inst.r, y, settings).u;
      const Point diff = sx - sy;
      const double lhs = pairing(diff, duality_map(space, sx) - duality_map(space, sy));
      const double rhs = pairing(diff, duality_map(space, x) - duality_map(space, y));
      firm.add(i, rhs + 10.0 * tol - lhs, "<Sx - Sy, JSx - JSy> > <Sx - Sy, Jx - Jy>");

      const Point other = resolvent(space, inst.C, inst.F, inst.r, x, settings, inst.C.witness()).u;
      single.add(i, 100.0 * tol - norm(space, other - sx), "two starts give different S_r x");

      const double ep_q = ep_residual(inst.C, inst.F, inst.q, settings);
      if (ep_q < -tol) {
        inequality.fail(i, "constructed equilibrium has ep_residual " + std::to_string(ep_q));
      } else {
        inequality.add(i,
                  lyapunov_phi(space, inst.q, x) + 100.0 * tol - lyapunov_phi(space, inst.q, sx) -
                      lyapunov_phi(space, sx, x),
                  "phi(q, Sx) + phi(Sx, x) > phi(q, x)");
      }

      // Equilibria are fixed by S_r; a random feasible point is fixed exactly
      // when it is an equilibrium.
      const Point sq = resolvent(space, inst.C, inst.F, inst.r, inst.q, settings).u;
      fixed.add(i, 100.0 * tol - norm(space, sq - inst.q), "equilibrium q moved by S_r");
      const Point u = fx;
      const bool is_fixed = norm(space, resolvent(space, inst.C, inst.F, inst.r, u, settings).u - u) <= 100.0 * tol;
      const bool is_ep = ep_residual(inst.C, inst.F, u, settings) >= -tol;
      if (is_fixed != is_ep) {
        fixed.add(i, -1.0, std::string("random point: ") + (is_fixed ? "fixed but not an equilibrium" : "equilibrium but not fixed"));
      }
    } catch (const Error& e) {
      for (Tally* t : {&firm, &single, &inequality, &fixed}) t->fail(i, e.what());
    }
  });

  Report report;
  for (const Tally* t : {&a1, &a2, &firm, &single, &inequality, &fixed}) report.checks.push_back(t->result());
  return report;
}

namespace {

struct CatalogEntry {
  std::string name;
  MultivaluedMap map;
  /// ProjectionMap only satisfies Phi(Tp, Tx) <= phi(p, x) when p != 2.
  bool fixed_first_only;
};

std::vector<CatalogEntry> catalog(double p, bool broken) {
  const Polyhedron big = Polyhedron::box(Eigen::VectorXd::Constant(2, -100.0), Eigen::VectorXd::Constant(2, 100.0));
  const Polyhedron K = big.intersect({HalfSpace(DualPoint{1.0, 1.0}, 1.0)}, Point{0.0, 0.0});
  const LpSpace space(2, p);
  std::vector<CatalogEntry> out;
  out.push_back({"segment(0,0.9)", MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 0.9), false});
  out.push_back({"segment((1,-1),0.5)", MultivaluedMap::segment_contraction(Point{1.0, -1.0}, 0.5), false});
  out.push_back({"segment((1,-1),1)", MultivaluedMap::segment_contraction(Point{1.0, -1.0}, 1.0), false});
  out.push_back({"projection(z1+z2<=1)", MultivaluedMap::projection(K), p != 2.0});
  Eigen::MatrixXd M(2, 2);
  M << 0.5, 0.0, 0.0, 0.8;
  out.push_back({"affine(diag(0.5,0.8))", MultivaluedMap::affine(space, M, Point{0.0, 0.0}, Point{0.0, 0.0}), false});
  if (broken) {
    out.push_back({"broken segment(0,1.2)", MultivaluedMap::segment_contraction_unchecked(Point{0.0, 0.0}, 1.2), false});
  }
  return out;
}

std::string p_label(double p) {
  std::ostringstream os;
  os << "p=" << p;
  return os.str();
}

}  // namespace

Report check_mappings(const CheckOptions& options) {
  require_samples(options);
  const auto n = static_cast<std::size_t>(options.samples);
  const SolverSettings& settings = options.settings;
  Report report;
  Tally in_image("pt_in_image", n);
  Tally nearest("pt_nearest_in_image", n);
  Tally fixed("fixed_points_exact", n);

  for (double p : kExponents) {
    const LpSpace space(2, p);
    const auto maps = catalog(p, options.broken_fixture);
    for (std::size_t m = 0; m < maps.size(); ++m) {
      const auto& entry = maps[m];
      CheckResult c{"rqne[" + entry.name + ", " + p_label(p) + "]", true, 0.0, ""};
      try {
        const RqneReport r = check_rqne(space, entry.map, options.samples, options.seed + m, settings);
        const double violation =
            entry.fixed_first_only ? r.max_violation_fixed_first : std::max(r.max_violation, r.max_violation_fixed_first);
        c.worst = 1e-9 - violation;
        c.passed = c.worst >= 0.0;
        if (!c.passed) {
          std::ostringstream os;
          os << "Phi(Tx,Tp) - phi(x,p) = " << r.max_violation << ", Phi(Tp,Tx) - phi(p,x) = "
             << r.max_violation_fixed_first;
          if (r.witness) os << ", witness x = " << fmt(r.witness->coords());
          c.detail = os.str();
        }
      } catch (const Error& e) {
        c.passed = false;
        c.worst = -std::numeric_limits<double>::infinity();
        c.detail = e.what();
      }
      report.checks.push_back(c);
    }
  }

  for_instances(options, n, [&](std::size_t i) {
    Rng rng = instance_rng(options.seed, i, 41);
    const double p = random_exponent(rng);
    const LpSpace space(2, p);
    const auto maps = catalog(p, false);
    const auto& entry = maps[static_cast<std::size_t>(pick(rng, static_cast<int>(maps.size())))];
    const Point x(random_vector(rng, 2, 10.0));
    try {
      const Point z = evaluate_PT(space, entry.map, x, settings).z;
      const PointSet img = image(space, entry.map, x, settings);
      const double scale = 1.0 + x.coords().cwiseAbs().maxCoeff();
      in_image.add(i, img.contains(z, 1e-12 * scale) ? 0.0 : -1.0, entry.name + ": P_T x not in T x");
      const double dz = norm(space, x - z);
      for (int k = 0; k < 100; ++k) {
        Point y = img.midpoint();
        if (const auto* seg = std::get_if<PointSet::Segment>(&img.description())) {
          const double t = uniform(rng, 0.0, 1.0);
          y = Point(seg->a.coords() + t * (seg->b.coords() - seg->a.coords()));
        }
        nearest.add(i, norm(space, x - y) - dz + 1e-12 * scale, entry.name + ": a point of T x is nearer");
      }
      const FixedSet fs = entry.map.fixed_set();
      std::vector<Point> ps;
      if (const auto* K = std::get_if<Polyhedron>(&fs)) {
        ps = sample_feasible(*K, 5, rng());
      } else {
        ps.push_back(std::get<Point>(fs));
      }
      for (const Point& q : ps) {
        const bool exact = evaluate_PT(space, entry.map, q, settings).z == q;
        fixed.add(i, exact ? 0.0 : -1.0, entry.name + ": P_T p != p at " + fmt(q.coords()));
      }
    } catch (const Error& e) {
      for (Tally* t : {&in_image, &nearest, &fixed}) t->fail(i, e.what());
    }
  });
  for (const Tally* t : {&in_image, &nearest, &fixed}) report.checks.push_back(t->result());
  return report;
}

namespace {

struct ScenarioRun {
  RunResult result;
  std::string error;
};

ScenarioRun run_catching(const AlgorithmConfig& config) {
  try {
    return {run(config), ""};
  } catch (const Error& e) {
    return {{}, e.what()};
  }
}

double limit_tolerance(const std::string& name) {
  if (name == "B") return 1e-5;
  if (name.rfind("C", 0) == 0) return 1e-3;
  return 1e-4;
}

}  // namespace

Report check_algorithm(const CheckOptions& options) {
  require_samples(options);
  Report report;
  std::vector<Scenario> scenarios = all_scenarios();
  for (auto& s : scenarios) s.config.settings = options.settings;

  std::vector<ScenarioRun> runs(scenarios.size());
  std::vector<ScenarioRun> hilbert(scenarios.size());
  kernels::for_each_index(
      scenarios.size(),
      [&](std::size_t k) {
        runs[k] = run_catching(scenarios[k].config);
        if (scenarios[k].config.space.is_hilbert()) {
          AlgorithmConfig h = scenarios[k].config;
          h.variant = Variant::hilbert;
          hilbert[k] = run_catching(h);
        }
      },
      options.exec);

  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const Scenario& s = scenarios[k];
    const ScenarioRun& r = runs[k];
    CheckResult trace{"trace[" + s.name + "]", true, 0.0, ""};
    CheckResult limit{"limit[" + s.name + "]", true, 0.0, ""};
    CheckResult closed{"closedness[" + s.name + "]", true, 0.0, ""};
    if (!r.error.empty()) {
      for (CheckResult* c : {&trace, &limit, &closed}) {
        c->passed = false;
        c->worst = -std::numeric_limits<double>::infinity();
        c->detail = r.error;
      }
    } else {
      const Report rep = verify_trace(r.result.trace, s.config, s.solution, r.result.converged);
      trace.worst = std::numeric_limits<double>::infinity();
      for (const auto& c : rep.checks) {
        trace.worst = std::min(trace.worst, c.worst);
        if (!c.passed && trace.passed) {
          trace.passed = false;
          trace.detail = c.name + (c.detail.empty() ? "" : ": " + c.detail);
        }
      }
      const double err = (r.result.final.coords() - s.solution.coords()).norm();
      limit.worst = limit_tolerance(s.name) - err;
      limit.passed = limit.worst >= 0.0;
      if (!limit.passed) limit.detail = "final " + fmt(r.result.final.coords());

      // A limit w of iterates with vanishing fix residuals must satisfy dist(w, Tw) <= 1e-6.
      const auto& last = r.result.trace.back();
      const double last_fix = *std::max_element(last.fix_residuals.begin(), last.fix_residuals.end());
      if (last_fix <= 1e-6) {
        double worst = 0.0;
        for (const auto& map : s.config.maps) {
          const Point z = evaluate_PT(s.config.space, map, r.result.final, s.config.settings).z;
          worst = std::max(worst, norm(s.config.space, r.result.final - z));
        }
        closed.worst = 1e-6 - worst;
        closed.passed = closed.worst >= 0.0;
      } else {
        closed.detail = "fix residuals did not vanish; not applicable";
      }
    }
    report.checks.push_back(trace);
    report.checks.push_back(limit);
    report.checks.push_back(closed);

    if (s.config.space.is_hilbert()) {
      CheckResult eq{"variant_equivalence[" + s.name + "]", true, 0.0, ""};
      const ScenarioRun& h = hilbert[k];
      if (!r.error.empty() || !h.error.empty()) {
        eq.passed = false;
        eq.worst = -std::numeric_limits<double>::infinity();
        eq.detail = r.error.empty() ? h.error : r.error;
      } else if (h.result.trace.size() != r.result.trace.size()) {
        eq.passed = false;
        eq.worst = -1.0;
        eq.detail = "trace lengths differ: " + std::to_string(r.result.trace.size()) + " vs " +
                    std::to_string(h.result.trace.size());
      } else {
        const double bound = 10.0 * s.config.settings.tol;
        eq.worst = bound;
        for (std::size_t j = 0; j < h.result.trace.size(); ++j) {
          const double gap = (h.result.trace[j].x_next.coords() - r.result.trace[j].x_next.coords()).norm();
          if (bound - gap < eq.worst) eq.worst = bound - gap;
          if (gap > bound && eq.passed) {
            eq.passed = false;
            eq.detail = "iterate " + std::to_string(j + 1) + " differs by " + std::to_string(gap);
          }
        }
      }
      report.checks.push_back(eq);
    }
  }

  // The cut is {z : phi(z, u) <= phi(z, x)} written as a linear inequality.
  const auto n = static_cast<std::size_t>(options.samples);
  Tally cut("cut_linearization", n);
  for_instances(options, n, [&](std::size_t i) {
    Rng rng = instance_rng(options.seed, i, 53);
    const int d = random_dim(rng);
    const LpSpace space(d, random_exponent(rng));
    const Point x(random_vector(rng, d, 5.0));
    const Point u(random_vector(rng, d, 5.0));
    const HalfSpace h = halfspace_from_pair(space, x, u);
    for (int k = 0; k < 10; ++k) {
      const Point z(random_vector(rng, d, 10.0));
      const double diff = 0.5 * (lyapunov_phi(space, z, x) - lyapunov_phi(space, z, u));
      const double scale = 1.0 + z.coords().squaredNorm() + x.coords().squaredNorm() + u.coords().squaredNorm();
      cut.add(i, 1e-12 * scale - std::abs(h.slack(z) - diff), "slack differs from (phi(z,x) - phi(z,u)) / 2");
    }
  });
  report.checks.push_back(cut.result());

  if (options.broken_fixture) {
    // 0 is a fixed point of the beta = 1.2 map, but y_n = 1.16 x_n lies
    // farther out than x_n, so the first cut already excludes 0.
    AlgorithmConfig config = scenario_a().config;
    config.maps = {MultivaluedMap::segment_contraction_unchecked(Point{0.0, 0.0}, 1.2)};
    config.weights = constant_weights({0.2, 0.8});
    config.settings = options.settings;
    IterationState state = initial_state(config);
    std::string stopped;
    try {
      for (int k = 0; k < 30; ++k) state = step(std::move(state), config);
    } catch (const Error& e) {
      stopped = e.what();
    }
    CheckResult c{"trace[broken segment(0,1.2)]", true, 0.0, ""};
    const Report rep = verify_trace(state.trace, config, Point{0.0, 0.0}, false);
    if (const CheckResult* kept = rep.find("solution_retained")) {
      c.passed = kept->passed;
      c.worst = kept->worst;
      c.detail = kept->detail;
    }
    if (!stopped.empty()) c.detail += (c.detail.empty() ? "" : "; ") + std::string("run stopped: ") + stopped;
    report.checks.push_back(c);
  }
  return report;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"space", "convex", "equilibrium", "mappings", "algorithm"};
  return names;
}

Report run_suite(const std::string& name, const CheckOptions& options) {
  require_samples(options);
  options.settings.validate();
  if (name == "space") return check_space(options);
  if (name == "convex") return check_convex(options);
  if (name == "equilibrium") return check_equilibrium(options);
  if (name == "mappings") return check_mappings(options);
  if (name == "algorithm") return check_algorithm(options);
  throw StructuralError("unknown suite '" + name + "'");
}

}  // namespace spm
