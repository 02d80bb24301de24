#include "spm/scenarios.hpp"

#include <sstream>

namespace spm {

namespace {

Eigen::VectorXd filled(int d, double v) { return Eigen::VectorXd::Constant(d, v); }

}  // namespace

Scenario scenario_a() {
  AlgorithmConfig config{LpSpace(2, 2.0),
                         Polyhedron::box(filled(2, -10.0), filled(2, 10.0)),
                         {MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 0.5),
                          MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 0.9)},
                         Bifunction::zero(2),
                         constant_weights({0.5, 0.25, 0.25}),
                         constant_r(1.0),
                         Point{5.0, 3.0}};
  config.max_outer = 500;
  return {"A", std::move(config), Point{0.0, 0.0}};
}

Polyhedron scenario_b_solution_set() {
  const Polyhedron C = Polyhedron::box(filled(3, -5.0), filled(3, 5.0));
  return C.intersect({HalfSpace(DualPoint{1.0, 1.0, 0.0}, 1.0), HalfSpace(DualPoint{0.0, -1.0, 1.0}, 0.5)},
                     Point{0.0, 0.0, 0.0});
}

Scenario scenario_b() {
  const Polyhedron big = Polyhedron::box(filled(3, -100.0), filled(3, 100.0));
  const Polyhedron K1 = big.intersect({HalfSpace(DualPoint{1.0, 1.0, 0.0}, 1.0)}, Point{0.0, 0.0, 0.0});
  const Polyhedron K2 = big.intersect({HalfSpace(DualPoint{0.0, -1.0, 1.0}, 0.5)}, Point{0.0, 0.0, 0.0});
  const LpSpace space(3, 2.0);
  const Point x0{4.0, 3.0, 2.0};
  AlgorithmConfig config{space,
                         Polyhedron::box(filled(3, -5.0), filled(3, 5.0)),
                         {MultivaluedMap::projection(K1), MultivaluedMap::projection(K2)},
                         Bifunction::zero(3),
                         constant_weights({0.5, 0.25, 0.25}),
                         constant_r(1.0),
                         x0};
  config.max_outer = 1000;
  Point oracle = generalized_projection(space, scenario_b_solution_set(), x0, config.settings).point;
  return {"B", std::move(config), std::move(oracle)};
}

Scenario scenario_c(double p) {
  const Point c{1.0, -1.0};
  AlgorithmConfig config{LpSpace(2, p),
                         Polyhedron::box(filled(2, -3.0), filled(2, 4.0)),
                         {MultivaluedMap::segment_contraction(c, 0.7), MultivaluedMap::segment_contraction(c, 0.9)},
                         Bifunction::zero(2),
                         constant_weights({0.5, 0.25, 0.25}),
                         constant_r(1.0),
                         Point{3.0, 2.0}};
  config.max_outer = 2000;
  std::ostringstream name;
  name << "C(p=" << p << ")";
  return {name.str(), std::move(config), c};
}

Scenario scenario_d() {
  AlgorithmConfig config{LpSpace(2, 2.0),
                         Polyhedron::box(filled(2, -2.0), filled(2, 2.0)),
                         {MultivaluedMap::segment_contraction(Point{0.0, 0.0}, 0.8)},
                         Bifunction::convex_cost(2.0 * Eigen::MatrixXd::Identity(2, 2), DualPoint{0.0, 0.0}),
                         constant_weights({0.5, 0.5}),
                         constant_r(1.0),
                         Point{1.5, -1.0}};
  config.max_outer = 1000;
  return {"D", std::move(config), Point{0.0, 0.0}};
}

std::vector<Scenario> all_scenarios() {
  std::vector<Scenario> out;
  out.push_back(scenario_a());
  out.push_back(scenario_b());
  out.push_back(scenario_c(4.0));
  out.push_back(scenario_c(1.5));
  out.push_back(scenario_d());
  return out;
}

}  // namespace spm
