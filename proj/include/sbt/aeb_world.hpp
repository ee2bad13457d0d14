#pragma once

// Built-in pedestrian-crossing world with a TTC-triggered emergency brake.
//
// The ego drives along +x from ego_start. An occluded pedestrian waits at
// ped_pos and starts walking along ped_cross_direction once the ego comes
// within the trigger distance. The AEB sees the pedestrian only after it has
// walked occlusion_reveal_dist out of cover and while inside detection_range.

#include <optional>

#include "sbt/simulation.hpp"

namespace sbt {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct AebWorldConfig {
  double dt = 0.01;
  double horizon = 12.0;
  Vec2 ego_start{0.0, 0.0};
  Vec2 ped_pos{80.0, 4.0};
  Vec2 ped_cross_direction{0.0, -1.0};
  double ped_stop_after = 8.0;
  double detection_range = 50.0;
  double occlusion_reveal_dist = 0.2;
  double ttc_brake_threshold = 1.8;
  double reaction_delay = 0.1;
  double max_decel = 8.0;
  double collision_radius = 1.0;

  /// Config invariant violations. Empty when valid.
  std::vector<std::string> validate() const;
  /// Copy with any matching keys of `settings` applied (e.g. "max_decel",
  /// "ped_x", "ego_start_y").
  AebWorldConfig with_overrides(const std::map<std::string, double>& settings) const;
};

/// The three searched quantities of the pedestrian-crossing scenario.
struct AebInputs {
  double ped_speed = 0.0;
  double ego_speed = 0.0;
  double ped_trigger_dist = 0.0;

  /// Reads PedSpeed, EgoSpeed and PedDist from the input vector, falling back
  /// to the spec's fixed settings. Throws SimulationError if one is missing.
  static AebInputs resolve(const ScenarioSpec& spec, const TestInput& input);
};

struct WorldState {
  long step = 0;
  Vec2 ego;
  double ego_speed = 0.0;
  Vec2 ped;
  double ped_walked = 0.0;
  bool ped_triggered = false;
  std::optional<long> brake_request_step;
  bool braking = false;

  double time(double dt) const { return static_cast<double>(step) * dt; }
  bool ped_walking(const AebWorldConfig& config) const {
    return ped_triggered && ped_walked < config.ped_stop_after;
  }
};

WorldState initial_world(const AebWorldConfig& config, const AebInputs& inputs);

/// One explicit Euler step of length config.dt.
WorldState step_builtin_world(const WorldState& state, const AebWorldConfig& config,
                              const AebInputs& inputs);

/// Strict inequality: a pass at exactly `radius` is not a collision.
bool in_collision(const ActorState& ego, const ActorState& ped, double radius);

/// First grid time at which ego and pedestrian are closer than `radius`.
std::optional<double> detect_collision(const SimulationOutput& output, double radius);

/// Deterministic, reentrant backend. The seed is recorded but unused.
class BuiltinAebSimulator final : public Simulator {
 public:
  BuiltinAebSimulator() = default;
  explicit BuiltinAebSimulator(AebWorldConfig config) : config_(config) {}

  std::string id() const override { return "builtin-aeb"; }
  const AebWorldConfig& config() const { return config_; }

  SimulationOutput simulate(const ScenarioSpec& spec, const TestInput& input,
                            std::uint64_t seed) override;

  /// Runs on the OpenMP kernel when workers > 1, otherwise serially.
  std::vector<BatchItem> simulate_batch(const ScenarioSpec& spec,
                                        const std::vector<TestInput>& inputs,
                                        std::uint64_t seed, std::size_t workers) override;

 private:
  AebWorldConfig config_;
};

/// Runs the world with explicit config and inputs.
SimulationOutput run_aeb_world(const AebWorldConfig& config, const AebInputs& inputs,
                               std::uint64_t seed);

}  // namespace sbt
