#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbt/scenario.hpp"

namespace sbt {

struct ActorState {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double speed = 0.0;

  bool operator==(const ActorState&) const = default;
};

/// Per-actor trajectories on a fixed time grid t_k = k * dt.
struct SimulationOutput {
  double dt = 0.0;
  std::map<std::string, std::vector<ActorState>> actors;
  bool collision = false;
  std::optional<double> collision_time;
  std::map<std::string, std::string> metadata;

  bool operator==(const SimulationOutput&) const = default;

  const std::vector<ActorState>& actor(const std::string& name) const;
  std::size_t steps() const { return actors.empty() ? 0 : actors.begin()->second.size(); }
};

/// Invariant violations of an output. Empty when valid.
std::vector<std::string> validate_output(const SimulationOutput& out);

/// A backend failure. Always carries the offending input.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, TestInput input)
      : std::runtime_error(what), input_(std::move(input)) {}
  const TestInput& input() const { return input_; }

 private:
  TestInput input_;
};

/// One position of a batch: either an output or the error that replaced it.
struct BatchItem {
  std::optional<SimulationOutput> output;
  std::string error;

  bool ok() const { return output.has_value(); }
};

/// Backend contract. Implementations must be callable from several threads
/// when `reentrant()` is true.
class Simulator {
 public:
  virtual ~Simulator() = default;

  virtual std::string id() const = 0;

  /// Throws SimulationError on backend failure.
  virtual SimulationOutput simulate(const ScenarioSpec& spec, const TestInput& input,
                                    std::uint64_t seed) = 0;

  /// result[i] corresponds to inputs[i]; failures are reported positionally.
  virtual std::vector<BatchItem> simulate_batch(const ScenarioSpec& spec,
                                                const std::vector<TestInput>& inputs,
                                                std::uint64_t seed, std::size_t workers);
};

}  // namespace sbt
