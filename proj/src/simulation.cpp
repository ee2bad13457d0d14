#include "sbt/simulation.hpp"

#include <fmt/format.h>

#include <cmath>

namespace sbt {

const std::vector<ActorState>& SimulationOutput::actor(const std::string& name) const {
  auto it = actors.find(name);
  if (it == actors.end()) throw std::out_of_range("missing actor '" + name + "'");
  return it->second;
}

std::vector<std::string> validate_output(const SimulationOutput& out) {
  std::vector<std::string> errors;
  if (!(out.dt > 0.0)) errors.emplace_back("dt must be positive");
  if (out.actors.empty()) errors.emplace_back("no actors");
  const std::size_t len = out.steps();
  for (const auto& [name, traj] : out.actors) {
    if (traj.size() != len) {
      errors.emplace_back("inconsistent trajectory lengths");
      break;
    }
  }
  if (errors.empty()) {
    for (const auto& [name, traj] : out.actors) {
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const double expected = static_cast<double>(k) * out.dt;
        if (std::abs(traj[k].t - expected) > 1e-9 * std::max(1.0, expected)) {
          errors.push_back(fmt::format("actor '{}' timestamp {} off the dt grid", name, k));
          break;
        }
        if (traj[k].speed < 0.0) {
          errors.push_back(fmt::format("actor '{}' negative speed at step {}", name, k));
          break;
        }
      }
    }
  }
  if (out.collision != out.collision_time.has_value())
    errors.emplace_back("collision_time present iff collision");
  if (out.collision_time && len > 0) {
    const double last = static_cast<double>(len - 1) * out.dt;
    if (*out.collision_time < 0.0 || *out.collision_time > last + 1e-9)
      errors.emplace_back("collision_time outside the simulated interval");
  }
  return errors;
}

std::vector<BatchItem> Simulator::simulate_batch(const ScenarioSpec& spec,
                                                 const std::vector<TestInput>& inputs,
                                                 std::uint64_t seed, std::size_t /*workers*/) {
  std::vector<BatchItem> results(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      results[i].output = simulate(spec, inputs[i], seed);
    } catch (const std::exception& e) {
      results[i].error = e.what();
    }
  }
  return results;
}

}  // namespace sbt
