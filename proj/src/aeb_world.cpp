#include "sbt/aeb_world.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "sbt/kernels.hpp"

namespace sbt {

namespace {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double lookup(const ScenarioSpec& spec, const TestInput& input, const char* name) {
  for (std::size_t i = 0; i < spec.parameters.size(); ++i)
    if (spec.parameters[i].name == name && i < input.values.size()) return input.values[i];
  if (auto it = spec.fixed_settings.find(name); it != spec.fixed_settings.end())
    return it->second;
  throw SimulationError(fmt::format("scenario does not define '{}'", name), input);
}

}  // namespace

std::vector<std::string> AebWorldConfig::validate() const {
  std::vector<std::string> errors;
  if (!(dt > 0.0)) errors.emplace_back("dt must be positive");
  if (!(horizon >= 1.0)) errors.emplace_back("horizon must be at least 1 s");
  if (!(max_decel > 0.0)) errors.emplace_back("max_decel must be positive");
  if (!(collision_radius > 0.0)) errors.emplace_back("collision_radius must be positive");
  const double norm = std::hypot(ped_cross_direction.x, ped_cross_direction.y);
  if (std::abs(norm - 1.0) > 1e-9) errors.emplace_back("ped_cross_direction must be a unit vector");
  return errors;
}

AebWorldConfig AebWorldConfig::with_overrides(const std::map<std::string, double>& s) const {
  AebWorldConfig c = *this;
  const std::pair<const char*, double*> fields[] = {
      {"dt", &c.dt},
      {"horizon", &c.horizon},
      {"ego_start_x", &c.ego_start.x},
      {"ego_start_y", &c.ego_start.y},
      {"ped_x", &c.ped_pos.x},
      {"ped_y", &c.ped_pos.y},
      {"ped_dir_x", &c.ped_cross_direction.x},
      {"ped_dir_y", &c.ped_cross_direction.y},
      {"ped_stop_after", &c.ped_stop_after},
      {"detection_range", &c.detection_range},
      {"occlusion_reveal_dist", &c.occlusion_reveal_dist},
      {"ttc_brake_threshold", &c.ttc_brake_threshold},
      {"reaction_delay", &c.reaction_delay},
      {"max_decel", &c.max_decel},
      {"collision_radius", &c.collision_radius},
  };
  for (const auto& [key, value] : s) {
    if (key == "PedSpeed" || key == "EgoSpeed" || key == "PedDist") continue;
    auto it = std::find_if(std::begin(fields), std::end(fields),
                           [&](const auto& f) { return key == f.first; });
    if (it == std::end(fields)) throw std::invalid_argument("unknown world setting '" + key + "'");
    *it->second = value;
  }
  return c;
}

AebInputs AebInputs::resolve(const ScenarioSpec& spec, const TestInput& input) {
  return {lookup(spec, input, "PedSpeed"), lookup(spec, input, "EgoSpeed"),
          lookup(spec, input, "PedDist")};
}

WorldState initial_world(const AebWorldConfig& config, const AebInputs& inputs) {
  WorldState s;
  s.ego = config.ego_start;
  s.ego_speed = inputs.ego_speed;
  s.ped = config.ped_pos;
  return s;
}

WorldState step_builtin_world(const WorldState& state, const AebWorldConfig& config,
                              const AebInputs& inputs) {
  WorldState next = state;
  const double dist = distance(state.ego, state.ped);

  if (!next.ped_triggered && dist <= inputs.ped_trigger_dist) next.ped_triggered = true;

  // AEB perception and decision on the current state.
  const bool revealed = next.ped_walked >= config.occlusion_reveal_dist &&
                        dist <= config.detection_range;
  const double gap = state.ped.x - state.ego.x;
  const double ttc = gap / std::max(state.ego_speed, 0.1);
  if (!next.brake_request_step && revealed && gap > 0.0 && ttc <= config.ttc_brake_threshold)
    next.brake_request_step = state.step;
  const long delay_steps = std::lround(config.reaction_delay / config.dt);
  next.braking = next.brake_request_step && state.step >= *next.brake_request_step + delay_steps;

  next.ego.x += state.ego_speed * config.dt;
  if (next.braking) next.ego_speed = std::max(0.0, state.ego_speed - config.max_decel * config.dt);

  if (next.ped_walking(config)) {
    const double d = std::min(inputs.ped_speed * config.dt, config.ped_stop_after - next.ped_walked);
    next.ped.x += config.ped_cross_direction.x * d;
    next.ped.y += config.ped_cross_direction.y * d;
    next.ped_walked += d;
  }
  next.step = state.step + 1;
  return next;
}

bool in_collision(const ActorState& ego, const ActorState& ped, double radius) {
  return std::hypot(ego.x - ped.x, ego.y - ped.y) < radius;
}

std::optional<double> detect_collision(const SimulationOutput& output, double radius) {
  const auto& ego = output.actor("ego");
  const auto& ped = output.actor("pedestrian");
  const std::size_t n = std::min(ego.size(), ped.size());
  for (std::size_t k = 0; k < n; ++k)
    if (in_collision(ego[k], ped[k], radius)) return ego[k].t;
  return std::nullopt;
}

SimulationOutput run_aeb_world(const AebWorldConfig& config, const AebInputs& inputs,
                               std::uint64_t seed) {
  SimulationOutput out;
  out.dt = config.dt;
  out.metadata = {{"simulator", "builtin-aeb"},
                  {"sampling_rate", fmt::format("{:g}", 1.0 / config.dt)},
                  {"seed", std::to_string(seed)}};
  auto& ego = out.actors["ego"];
  auto& ped = out.actors["pedestrian"];
  const double ped_yaw = std::atan2(config.ped_cross_direction.y, config.ped_cross_direction.x);
  const long horizon_steps = std::lround(config.horizon / config.dt);
  const std::size_t capacity = static_cast<std::size_t>(horizon_steps) + 1;
  ego.reserve(capacity);
  ped.reserve(capacity);

  WorldState s = initial_world(config, inputs);
  for (;;) {
    const double t = s.time(config.dt);
    ego.push_back({t, s.ego.x, s.ego.y, 0.0, s.ego_speed});
    ped.push_back({t, s.ped.x, s.ped.y, ped_yaw,
                   s.ped_walking(config) ? inputs.ped_speed : 0.0});

    if (in_collision(ego.back(), ped.back(), config.collision_radius)) {
      out.collision = true;
      out.collision_time = t;
      break;
    }
    const bool passed = s.ego.x > config.ped_pos.x + 5.0;
    const bool settled = s.ego_speed == 0.0 && s.ped_walked >= config.ped_stop_after;
    if (passed || settled || s.step >= horizon_steps) break;
    s = step_builtin_world(s, config, inputs);
  }
  return out;
}

SimulationOutput BuiltinAebSimulator::simulate(const ScenarioSpec& spec, const TestInput& input,
                                               std::uint64_t seed) {
  if (auto errors = validate_input(spec, input); !errors.empty())
    throw SimulationError(errors.front(), input);
  AebWorldConfig config;
  try {
    config = config_.with_overrides(spec.fixed_settings);
  } catch (const std::invalid_argument& e) {
    throw SimulationError(e.what(), input);
  }
  if (auto errors = config.validate(); !errors.empty())
    throw SimulationError("invalid world config: " + errors.front(), input);
  return run_aeb_world(config, AebInputs::resolve(spec, input), seed);
}

std::vector<BatchItem> BuiltinAebSimulator::simulate_batch(const ScenarioSpec& spec,
                                                           const std::vector<TestInput>& inputs,
                                                           std::uint64_t seed,
                                                           std::size_t workers) {
  if (workers <= 1) return kernels::simulate_batch_serial(*this, spec, inputs, seed);
  return kernels::simulate_batch_omp(*this, spec, inputs, seed, workers);
}

}  // namespace sbt
