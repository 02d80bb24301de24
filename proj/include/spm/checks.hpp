#pragma once

// Randomized invariant suites, one per module. Each check records its worst
// margin (value minus allowed bound, so negative means violated).

#include <cstdint>
#include <string>
#include <vector>

#include "spm/convex.hpp"
#include "spm/report.hpp"

namespace spm {

struct CheckOptions {
  std::uint64_t seed = 1;
  /// Random instances (or draws) per check; must be >= 1.
  int samples = 100;
  /// Adds the segment map with beta = 1.2, which is not relatively
  /// quasi-nonexpansive, to the mappings and algorithm suites.
  bool broken_fixture = false;
  SolverSettings settings{};
  kernels::Exec exec = kernels::Exec::parallel;
};

Report check_space(const CheckOptions& options);
/// Projection certificate, three-point inequality, idempotence, p = 2
/// agreement with the Euclidean projection and agreement with Dykstra.
Report check_convex(const CheckOptions& options);
/// F(x, x) = 0, monotonicity of F, firm nonexpansiveness, single-valuedness, the resolvent
/// inequality and fixed points of S_r versus equilibria.
Report check_equilibrium(const CheckOptions& options);
Report check_mappings(const CheckOptions& options);
/// Scenario runs with trace verification, variant equivalence, cut
/// linearization and the closedness surrogate.
Report check_algorithm(const CheckOptions& options);

/// Names accepted by run_suite.
const std::vector<std::string>& suite_names();

/// Dispatches by name. Throws StructuralError for an unknown suite or
/// samples < 1.
Report run_suite(const std::string& name, const CheckOptions& options);

}  // namespace spm
