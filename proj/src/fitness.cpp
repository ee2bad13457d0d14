#include "sbt/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sbt {

namespace {

struct ActorPair {
  const std::vector<ActorState>* ego;
  const std::vector<ActorState>* ped;
};

ActorPair require_actors(const SimulationOutput& output) {
  auto ego = output.actors.find("ego");
  auto ped = output.actors.find("pedestrian");
  if (ego == output.actors.end()) throw EvaluationError("missing actor 'ego'");
  if (ped == output.actors.end()) throw EvaluationError("missing actor 'pedestrian'");
  if (ego->second.empty() || ego->second.size() != ped->second.size())
    throw EvaluationError("ego and pedestrian trajectories are not aligned");
  return {&ego->second, &ped->second};
}

}  // namespace

MinDistanceVelocity eval_min_distance_velocity(const SimulationOutput& output,
                                               double collision_radius) {
  const auto [ego, ped] = require_actors(output);
  double best = std::numeric_limits<double>::infinity();
  double speed = 0.0;
  for (std::size_t k = 0; k < ego->size(); ++k) {
    const double d = std::hypot((*ego)[k].x - (*ped)[k].x, (*ego)[k].y - (*ped)[k].y);
    if (d < best) {  // strict: ties keep the earliest step
      best = d;
      speed = (*ego)[k].speed;
    }
  }
  // A recorded collision is contact even if the sampled distance was not below
  // the radius (external backends).
  const double f1 = output.collision ? 0.0 : std::max(0.0, best - collision_radius);
  return {f1, speed};
}

double eval_min_ttc(const SimulationOutput& output, double collision_radius) {
  const auto [ego, ped] = require_actors(output);
  double best = kNoTtc;
  for (std::size_t k = 0; k < ego->size(); ++k) {
    const ActorState& e = (*ego)[k];
    const ActorState& p = (*ped)[k];
    const double rx = p.x - e.x;
    const double ry = p.y - e.y;
    const double dist = std::hypot(rx, ry);
    if (dist == 0.0) return 0.0;
    const double vx = p.speed * std::cos(p.yaw) - e.speed * std::cos(e.yaw);
    const double vy = p.speed * std::sin(p.yaw) - e.speed * std::sin(e.yaw);
    const double closing = -(rx * vx + ry * vy) / dist;
    if (closing <= 0.0) continue;
    best = std::min(best, std::max(0.0, dist - collision_radius) / closing);
  }
  return best;
}

bool is_critical(const std::vector<double>& objectives, const SimulationOutput& /*output*/) {
  return objectives.size() >= 2 && objectives[0] == 0.0 && objectives[1] > 0.0;
}

std::vector<double> to_minimization(const std::vector<double>& objectives,
                                    const std::vector<Direction>& directions) {
  if (objectives.size() != directions.size())
    throw std::invalid_argument("to_minimization: objective/direction length mismatch");
  std::vector<double> out(objectives.size());
  for (std::size_t i = 0; i < objectives.size(); ++i)
    out[i] = directions[i] == Direction::Maximize ? -objectives[i] : objectives[i];
  return out;
}

FitnessSpec make_fitness(const std::string& name, double collision_radius) {
  if (name == "min_distance_velocity") {
    return {name,
            {"F1", "F2"},
            {Direction::Minimize, Direction::Maximize},
            [collision_radius](const SimulationOutput& out) {
              const auto r = eval_min_distance_velocity(out, collision_radius);
              return std::vector<double>{r.min_distance, r.velocity_at_min};
            }};
  }
  if (name == "min_ttc") {
    return {name,
            {"TTC"},
            {Direction::Minimize},
            [collision_radius](const SimulationOutput& out) {
              return std::vector<double>{eval_min_ttc(out, collision_radius)};
            }};
  }
  throw std::invalid_argument("unknown fitness function: " + name);
}

CriticalSpec make_critical(const std::string& name) {
  if (name == "adas_distance_velocity") return {name, is_critical};
  if (name == "collision")
    return {name, [](const std::vector<double>&, const SimulationOutput& out) { return out.collision; }};
  throw std::invalid_argument("unknown criticality function: " + name);
}

std::vector<std::string> fitness_names() { return {"min_distance_velocity", "min_ttc"}; }
std::vector<std::string> critical_names() { return {"adas_distance_velocity", "collision"}; }

}  // namespace sbt
