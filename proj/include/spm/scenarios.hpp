#pragma once

// The four reference runs used by the check suites, the acceptance binary and
// the example configs, each with the limit the iteration must reach.

#include <string>
#include <vector>

#include "spm/algorithm.hpp"

namespace spm {

struct Scenario {
  std::string name;
  AlgorithmConfig config;
  /// Pi_F x_0 for the common solution set F.
  Point solution;
};

/// d=2, p=2, two segment contractions toward 0, F = 0. Limit 0.
Scenario scenario_a();

/// d=3, p=2, projections onto {z1 + z2 <= 1} and {z3 - z2 <= 1/2}, F = 0.
/// The limit is the generalized projection of x_0 onto C ∩ K1 ∩ K2.
Scenario scenario_b();

/// The explicit polyhedron C ∩ K1 ∩ K2 of scenario B.
Polyhedron scenario_b_solution_set();

/// d=2, two segment contractions toward c = (1, -1) in l_p. Limit c.
Scenario scenario_c(double p);

/// d=2, p=2, one segment contraction toward 0 and F(x, y) = |y|^2 - |x|^2.
Scenario scenario_d();

/// A, B, C (p = 4 and p = 1.5) and D.
std::vector<Scenario> all_scenarios();

}  // namespace spm
