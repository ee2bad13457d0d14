#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sbt/fitness.hpp"
#include "sbt/scenario.hpp"
#include "sbt/simulation.hpp"

namespace sbt {

/// Everything the search needs: the space, how to simulate a point, and how
/// to score and classify the result.
struct AdasProblem {
  std::string problem_name;
  ScenarioSpec spec;
  FitnessSpec fitness;
  CriticalSpec criticality;
  std::shared_ptr<Simulator> simulator;

  const std::vector<Direction>& objective_directions() const { return fitness.directions; }
};

/// True for "<scheme>:<name>" ids such as "builtin:pedestrian_crossing",
/// which name a scenario without a backing file.
bool is_logical_scenario_id(const std::string& scenario_path);

/// Empty iff every invariant holds and the scenario file (if a path) exists.
std::vector<std::string> validate_problem(const AdasProblem& problem);

/// Pedestrian-crossing space PedSpeed [0.5, 3], EgoSpeed [1, 22],
/// PedDist [0, 60] on the built-in simulator.
AdasProblem make_pedestrian_crossing_problem();
ScenarioSpec pedestrian_crossing_spec();

}  // namespace sbt
