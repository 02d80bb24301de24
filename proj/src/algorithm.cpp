#include "spm/algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace spm {

WeightSchedule constant_weights(std::vector<double> weights) {
  return [w = std::move(weights)](int) { return w; };
}

WeightSchedule default_weights(int m) {
  std::vector<double> w(static_cast<std::size_t>(m) + 1, m > 0 ? 0.5 / m : 0.0);
  w[0] = m > 0 ? 0.5 : 1.0;
  return constant_weights(std::move(w));
}

RSchedule constant_r(double r) {
  return [r](int) { return r; };
}

void AlgorithmConfig::validate() const {
  const int d = space.dim();
  if (C.dim() != d) throw StructuralError("C: dimension does not match the space");
  if (F.dim() != d) throw StructuralError("bifunction: dimension does not match the space");
  if (x0.dim() != d) throw StructuralError("x0: dimension does not match the space");
  if (!C.contains(x0, kWitnessTol)) throw StructuralError("x0: must lie in C");
  if (maps.empty()) throw StructuralError("maps: at least one mapping is required");
  for (const auto& m : maps) {
    if (m.dim() != d) throw StructuralError("maps: dimension does not match the space");
  }
  if (!(stop_tol > 0.0)) throw StructuralError("stop_tol: must be positive");
  if (max_outer < 1) throw StructuralError("max_outer: must be at least 1");
  if (!(w_min > 0.0)) throw StructuralError("w_min: must be positive");
  if (!(r_min > 0.0)) throw StructuralError("r_min: must be positive");
  if (!weights) throw StructuralError("weights: schedule missing");
  if (!r_schedule) throw StructuralError("r: schedule missing");
  if (variant == Variant::hilbert && !space.is_hilbert()) throw StructuralError("variant: hilbert requires p = 2");
  if (variant == Variant::single_valued) {
    for (const auto& m : maps) {
      if (!m.single_valued()) throw StructuralError("variant: single_valued requires single-valued maps");
    }
  }
  settings.validate();
  weights_at(0);
  r_at(0);
}

std::vector<double> AlgorithmConfig::weights_at(int n) const {
  std::vector<double> w = weights(n);
  if (w.size() != maps.size() + 1) {
    throw StructuralError("weights: expected " + std::to_string(maps.size() + 1) + " entries, got " +
                          std::to_string(w.size()));
  }
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw StructuralError("weights: entries must be finite and nonnegative");
  }
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(sum > 0.0)) throw StructuralError("weights: sum must be positive");
  if (sum != 1.0) {
    for (double& v : w) v /= sum;
  }
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[0] * w[i] < w_min) {
      throw StructuralError("weights: a_0 * a_" + std::to_string(i) + " = " + std::to_string(w[0] * w[i]) +
                            " is below w_min at step " + std::to_string(n));
    }
  }
  return w;
}

double AlgorithmConfig::r_at(int n) const {
  const double r = r_schedule(n);
  if (!(r > 0.0) || !std::isfinite(r)) throw StructuralError("r: must be positive at step " + std::to_string(n));
  if (r < r_min) throw StructuralError("r: r_n below r_min at step " + std::to_string(n));
  return r;
}

IterationState initial_state(const AlgorithmConfig& config) {
  config.validate();
  return IterationState{0, config.x0, config.C, {}};
}

namespace {

// Below this relative size the normal Jx - Ju is dominated by rounding in J,
// and the cut's orientation carries no information.
constexpr double kFlatCut = 1e-10;

bool numerically_flat(const Eigen::VectorXd& a, const Eigen::VectorXd& jx, const Eigen::VectorXd& ju) {
  return a.cwiseAbs().maxCoeff() <= kFlatCut * std::max(jx.cwiseAbs().maxCoeff(), ju.cwiseAbs().maxCoeff());
}

}  // namespace

HalfSpace halfspace_from_pair(const LpSpace& space, const Point& x, const Point& u) {
  if (x == u) return HalfSpace::vacuous(space.dim());
  const DualPoint jx = duality_map(space, x);
  const DualPoint ju = duality_map(space, u);
  const DualPoint a = jx - ju;
  if (numerically_flat(a.coords(), jx.coords(), ju.coords())) return HalfSpace::vacuous(space.dim());
  return HalfSpace(a, 0.5 * norm_sq_difference(space, x, u));
}

namespace {

HalfSpace euclidean_bisector(const Point& x, const Point& u) {
  if (x == u) return HalfSpace::vacuous(x.dim());
  const Eigen::VectorXd a = x.coords() - u.coords();
  if (numerically_flat(a, x.coords(), u.coords())) return HalfSpace::vacuous(x.dim());
  return HalfSpace(DualPoint(a), 0.5 * (x.coords() + u.coords()).dot(a));
}

template <class Fn>
auto at_step(int n, Fn&& fn) {
  try {
    return fn();
  } catch (const SolverFailure& e) {
    throw SolverFailure(e.what(), e.last_iterate(), e.residual(), n);
  } catch (const CertificateFailure& e) {
    throw CertificateFailure(e.what(), e.residual(), n);
  }
}

}  // namespace

IterationState step(IterationState state, const AlgorithmConfig& config) {
  const LpSpace& space = config.space;
  const SolverSettings& settings = config.settings;
  const int n = state.n;
  const Point& x = state.x;
  const std::vector<double> w = config.weights_at(n);
  const double r = config.r_at(n);
  const bool hilbert = config.variant == Variant::hilbert;

  StepDiagnostics diag;
  diag.n = n;
  diag.x = x;

  // Selections z_{n,i} and the P_T residuals.
  std::vector<Point> z;
  z.reserve(config.maps.size());
  for (const auto& map : config.maps) {
    const Point pt = at_step(n, [&] { return evaluate_PT(space, map, x, settings).z; });
    diag.fix_residuals.push_back(norm(space, x - pt));
    if (config.variant == Variant::multivalued_direct) {
      z.push_back(at_step(n, [&] { return select(space, map, x, settings).z; }));
    } else {
      z.push_back(pt);
    }
  }

  if (hilbert) {
    Eigen::VectorXd y = w[0] * x.coords();
    for (std::size_t i = 0; i < z.size(); ++i) y += w[i + 1] * z[i].coords();
    diag.y = Point(std::move(y));
  } else {
    Eigen::VectorXd dual = w[0] * duality_map(space, x).coords();
    for (std::size_t i = 0; i < z.size(); ++i) dual += w[i + 1] * duality_map(space, z[i]).coords();
    diag.y = inverse_duality_map(space, DualPoint(std::move(dual)));
  }

  if (hilbert && std::holds_alternative<ZeroBifunction>(config.F.variant())) {
    diag.u = at_step(n, [&] { return euclidean_project(config.C, diag.y, settings); });
  } else {
    const auto res = at_step(n, [&] { return resolvent(space, config.C, config.F, r, diag.y, settings); });
    diag.u = res.u;
    diag.inner_iters += res.inner_iters;
  }

  diag.cut = hilbert ? euclidean_bisector(x, diag.u) : halfspace_from_pair(space, x, diag.u);
  Polyhedron next = [&] {
    try {
      return state.Cn.with_cut(diag.cut, settings.max_iter);
    } catch (const StructuralError& e) {
      throw AlgorithmFailure(std::string("C_{n+1} appears empty: ") + e.what(), n);
    }
  }();

  if (hilbert) {
    diag.x_next = at_step(n, [&] { return euclidean_project(next, config.x0, settings); });
  } else {
    const auto proj = at_step(n, [&] {
      const Point start = euclidean_project(next, config.x0, settings);
      return generalized_projection(space, next, config.x0, settings, start);
    });
    diag.x_next = proj.point;
    diag.inner_iters += proj.iterations;
  }

  diag.step_norm = norm(space, diag.x_next - x);
  diag.phi_to_x0 = lyapunov_phi(space, x, config.x0);
  diag.phi_next_to_u = lyapunov_phi(space, diag.x_next, diag.u);
  diag.phi_next_to_x = lyapunov_phi(space, diag.x_next, x);
  diag.ep_res = at_step(n, [&] { return ep_residual(config.C, config.F, diag.u, settings); });
  diag.cut_count = next.halfspaces().size() - config.C.halfspaces().size();

  state.x = diag.x_next;
  state.Cn = std::move(next);
  state.trace.push_back(std::move(diag));
  ++state.n;
  return state;
}

RunResult run(const AlgorithmConfig& config) {
  IterationState state = initial_state(config);
  bool converged = false;
  while (state.n < config.max_outer) {
    state = step(std::move(state), config);
    if (state.trace.back().step_norm <= config.stop_tol) {
      converged = true;
      break;
    }
  }
  return {state.x, converged, std::move(state.trace)};
}

Report verify_trace(const std::vector<StepDiagnostics>& trace, const AlgorithmConfig& config,
                    const std::optional<Point>& known_solution, bool converged) {
  const LpSpace& space = config.space;
  const double slack = 10.0 * config.settings.tol;
  Report report;

  {
    CheckResult c{"phi_to_x0_nondecreasing", true, slack, ""};
    double prev = -1.0;
    for (const auto& s : trace) {
      if (prev >= 0.0) {
        const double margin = s.phi_to_x0 - prev + slack;
        c.worst = std::min(c.worst, margin);
        if (margin < 0.0 && c.passed) {
          c.passed = false;
          c.detail = "decrease at step " + std::to_string(s.n);
        }
      }
      prev = s.phi_to_x0;
    }
    if (!trace.empty()) {
      const double last = lyapunov_phi(space, trace.back().x_next, config.x0);
      c.worst = std::min(c.worst, last - prev + slack);
      if (last - prev + slack < 0.0 && c.passed) {
        c.passed = false;
        c.detail = "decrease at final iterate";
      }
    }
    report.checks.push_back(c);
  }

  {
    // x_{n+1} in C_{n+1}: phi(x_{n+1}, u_n) <= phi(x_{n+1}, x_n).
    CheckResult c{"next_iterate_in_cut", true, slack, ""};
    for (const auto& s : trace) {
      const double margin = s.phi_next_to_x - s.phi_next_to_u;
      c.worst = std::min(c.worst, margin + slack);
      if (margin + slack < 0.0 && c.passed) {
        c.passed = false;
        c.detail = "step " + std::to_string(s.n);
      }
    }
    report.checks.push_back(c);
  }

  {
    // x_m in C_m, which lies inside every earlier cut.
    CheckResult c{"cuts_nested", true, slack, ""};
    for (std::size_t k = 0; k < trace.size(); ++k) {
      for (std::size_t m = k; m < trace.size(); ++m) {
        const double margin = trace[k].cut.slack(trace[m].x_next);
        c.worst = std::min(c.worst, margin + slack);
        if (margin + slack < 0.0 && c.passed) {
          c.passed = false;
          c.detail = "x_" + std::to_string(m + 1) + " outside cut " + std::to_string(k);
        }
      }
    }
    report.checks.push_back(c);
  }

  if (known_solution) {
    CheckResult c{"solution_retained", true, slack, ""};
    for (const auto& s : trace) {
      const double margin = s.cut.slack(*known_solution);
      c.worst = std::min(c.worst, margin + slack);
      if (margin + slack < 0.0 && c.passed) {
        c.passed = false;
        std::ostringstream os;
        os << "known solution cut off at step " << s.n << " by " << -margin;
        c.detail = os.str();
      }
    }
    report.checks.push_back(c);
  }

  if (converged && !trace.empty()) {
    const auto& last = trace.back();
    CheckResult step_check{"step_below_stop_tol", last.step_norm <= config.stop_tol,
                           config.stop_tol - last.step_norm, ""};
    report.checks.push_back(step_check);

    const double bound = 100.0 * config.stop_tol;
    CheckResult res{"residuals_below_bound", true, 0.0, ""};
    double worst_fix = 0.0;
    for (double f : last.fix_residuals) worst_fix = std::max(worst_fix, f);
    res.worst = std::min(bound - worst_fix, last.ep_res + bound);
    res.passed = res.worst >= 0.0;
    if (!res.passed) {
      std::ostringstream os;
      os << "fix residual " << worst_fix << ", ep residual " << last.ep_res << " vs bound " << bound;
      res.detail = os.str();
    }
    report.checks.push_back(res);
  }
  return report;
}

}  // namespace spm
