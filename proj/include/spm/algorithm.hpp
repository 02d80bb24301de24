#pragma once

// Shrinking projection iteration:
//
//   y_n     = J^{-1}(a_{n,0} J x_n + sum_i a_{n,i} J z_{n,i}),  z_{n,i} in P_{T_i} x_n
//   u_n     = S_{r_n} y_n
//   C_{n+1} = {z in C_n : phi(z, u_n) <= phi(z, x_n)}
//   x_{n+1} = Pi_{C_{n+1}} x_0
//
// The cut defining C_{n+1} is linear in z because the |z|^2 terms cancel.

#include <functional>
#include <optional>
#include <vector>

#include "spm/equilibrium.hpp"
#include "spm/mappings.hpp"
#include "spm/report.hpp"

namespace spm {

enum class Variant {
  /// z_{n,i} = P_{T_i} x_n.
  multivalued_PT,
  /// z_{n,i} chosen from T_i x_n by each map's SelectFrom flag.
  multivalued_direct,
  /// Every T_i single-valued; z_{n,i} = T_i x_n.
  single_valued,
  /// p = 2 only; combinations, cuts and projections in Euclidean form.
  hilbert,
};

/// n -> (a_{n,0}, ..., a_{n,m}); normalized to sum 1 on evaluation.
using WeightSchedule = std::function<std::vector<double>(int)>;
using RSchedule = std::function<double(int)>;

WeightSchedule constant_weights(std::vector<double> weights);
/// a_0 = 1/2, a_i = 1/(2m).
WeightSchedule default_weights(int m);
RSchedule constant_r(double r);

struct AlgorithmConfig {
  LpSpace space;
  Polyhedron C;
  std::vector<MultivaluedMap> maps;
  Bifunction F;
  WeightSchedule weights;
  RSchedule r_schedule;
  Point x0;
  double stop_tol = 1e-8;
  int max_outer = 1000;
  Variant variant = Variant::multivalued_PT;
  /// Lower bound on a_{n,0} a_{n,i}, i >= 1.
  double w_min = 1e-6;
  /// Lower bound on r_n.
  double r_min = 1e-6;
  SolverSettings settings{};

  /// Throws StructuralError naming the offending field.
  void validate() const;
  /// Normalized weights for step n; checks nonnegativity and w_min.
  std::vector<double> weights_at(int n) const;
  /// r_n, checked against r_min.
  double r_at(int n) const;
};

struct StepDiagnostics {
  int n = 0;
  double step_norm = 0.0;       ///< |x_{n+1} - x_n|
  double phi_to_x0 = 0.0;       ///< phi(x_n, x_0)
  double phi_next_to_u = 0.0;   ///< phi(x_{n+1}, u_n)
  double phi_next_to_x = 0.0;   ///< phi(x_{n+1}, x_n)
  std::vector<double> fix_residuals;  ///< dist(x_n, P_{T_i} x_n)
  double ep_res = 0.0;          ///< ep_residual(u_n)
  int inner_iters = 0;
  std::size_t cut_count = 0;    ///< cuts defining C_{n+1}
  Point x;
  Point y;
  Point u;
  Point x_next;
  HalfSpace cut = HalfSpace::vacuous(1);
};

struct IterationState {
  int n = 0;
  Point x;
  Polyhedron Cn;
  std::vector<StepDiagnostics> trace;

  /// Cuts added on top of C (one per completed step).
  std::size_t cut_count(const Polyhedron& C) const { return Cn.halfspaces().size() - C.halfspaces().size(); }
};

IterationState initial_state(const AlgorithmConfig& config);

/// {z : phi(z, u) <= phi(z, x)} = {z : <z, Jx - Ju> <= (|x|^2 - |u|^2) / 2}.
/// Vacuous when x == u, or when Jx - Ju is at the rounding level of Jx and
/// Ju (relative size below 1e-10).
HalfSpace halfspace_from_pair(const LpSpace& space, const Point& x, const Point& u);

/// One outer iteration. Solver and certificate failures are rethrown with the
/// step index; an empty C_{n+1} raises AlgorithmFailure.
IterationState step(IterationState state, const AlgorithmConfig& config);

struct RunResult {
  Point final;
  bool converged = false;
  std::vector<StepDiagnostics> trace;
};

/// Steps until |x_{n+1} - x_n| <= stop_tol or max_outer steps.
RunResult run(const AlgorithmConfig& config);

/// Checks the iteration invariants along a trace: monotone phi(x_n, x_0), cut
/// membership of x_{n+1}, nesting of later iterates in earlier cuts,
/// retention of a known solution, and decay of step and residuals when the
/// run converged.
Report verify_trace(const std::vector<StepDiagnostics>& trace, const AlgorithmConfig& config,
                    const std::optional<Point>& known_solution = std::nullopt, bool converged = true);

}  // namespace spm
