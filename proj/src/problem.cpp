#include "sbt/problem.hpp"

#include <cctype>
#include <filesystem>

#include "sbt/aeb_world.hpp"

namespace sbt {

bool is_logical_scenario_id(const std::string& path) {
  const auto colon = path.find(':');
  if (colon == std::string::npos || colon == 0) return false;
  for (std::size_t i = 0; i < colon; ++i) {
    const char c = path[i];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return colon > 1;  // one-letter schemes look like Windows drives
}

std::vector<std::string> validate_problem(const AdasProblem& problem) {
  std::vector<std::string> errors = validate_spec(problem.spec);
  const auto& path = problem.spec.scenario_path;
  if (path.empty()) {
    errors.emplace_back("missing scenario path");
  } else if (!is_logical_scenario_id(path) && !std::filesystem::exists(path)) {
    errors.push_back("scenario file not found: " + path);
  }
  const auto& f = problem.fitness;
  if (!f.evaluate) errors.emplace_back("fitness has no evaluator");
  if (f.objective_names.empty()) errors.emplace_back("fitness declares no objectives");
  if (f.directions.size() != f.objective_names.size())
    errors.emplace_back("objective directions do not match the objective count");
  if (!problem.criticality.predicate) errors.emplace_back("missing criticality predicate");
  if (!problem.simulator) errors.emplace_back("missing simulator");
  return errors;
}

ScenarioSpec pedestrian_crossing_spec() {
  ScenarioSpec spec;
  spec.scenario_path = "builtin:pedestrian_crossing";
  spec.parameters = {{"PedSpeed", 0.5, 3.0, "m/s"}, {"EgoSpeed", 1.0, 22.0, "m/s"},
                     {"PedDist", 0.0, 60.0, "m"}};
  return spec;
}

AdasProblem make_pedestrian_crossing_problem() {
  AdasProblem p;
  p.problem_name = "PedestrianCrossingBuiltin";
  p.spec = pedestrian_crossing_spec();
  const auto simulator = std::make_shared<BuiltinAebSimulator>();
  p.fitness = make_fitness("min_distance_velocity", simulator->config().collision_radius);
  p.criticality = make_critical("adas_distance_velocity");
  p.simulator = simulator;
  return p;
}

}  // namespace sbt
