#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sbt/simulation.hpp"

namespace sbt {

enum class Direction { Minimize, Maximize };

/// Objective evaluator plus the names and orientation of its outputs.
struct FitnessSpec {
  std::string name;
  std::vector<std::string> objective_names;
  std::vector<Direction> directions;
  std::function<std::vector<double>(const SimulationOutput&)> evaluate;

  std::size_t objective_count() const { return objective_names.size(); }
};

/// Boolean verdict over (raw objectives, output). Must be total.
struct CriticalSpec {
  std::string name;
  std::function<bool(const std::vector<double>&, const SimulationOutput&)> predicate;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MinDistanceVelocity {
  double min_distance = 0.0;       // F1, meters beyond contact
  double velocity_at_min = 0.0;    // F2, ego speed at the first closest step
};

/// Single pass over the "ego" and "pedestrian" trajectories.
/// F1 = max(0, min distance - radius); F2 = ego speed where F1 is first attained.
MinDistanceVelocity eval_min_distance_velocity(const SimulationOutput& output,
                                               double collision_radius);

/// Returned by eval_min_ttc when the actors never close in.
inline constexpr double kNoTtc = 1e9;

/// Minimum over closing steps of (distance - radius) / closing speed.
double eval_min_ttc(const SimulationOutput& output, double collision_radius);

/// Default ADAS predicate: contact (F1 == 0) while the ego still moves (F2 > 0).
bool is_critical(const std::vector<double>& objectives, const SimulationOutput& output);

/// Negates maximised objectives. Throws std::invalid_argument on length mismatch.
std::vector<double> to_minimization(const std::vector<double>& objectives,
                                    const std::vector<Direction>& directions);

/// Registered fitness functions: "min_distance_velocity", "min_ttc".
FitnessSpec make_fitness(const std::string& name, double collision_radius);
/// Registered predicates: "adas_distance_velocity", "collision".
CriticalSpec make_critical(const std::string& name);

std::vector<std::string> fitness_names();
std::vector<std::string> critical_names();

}  // namespace sbt
