#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial reference twin with
// the same signature (minus the thread count); tests require them to agree
// element for element and the benchmark target compares their runtime.

#include <cstdint>
#include <functional>
#include <vector>

#include "sbt/simulation.hpp"

namespace sbt::kernels {

/// `sim.simulate` must be reentrant.
std::vector<BatchItem> simulate_batch_serial(Simulator& sim, const ScenarioSpec& spec,
                                             const std::vector<TestInput>& inputs,
                                             std::uint64_t seed);
std::vector<BatchItem> simulate_batch_omp(Simulator& sim, const ScenarioSpec& spec,
                                          const std::vector<TestInput>& inputs,
                                          std::uint64_t seed, std::size_t threads);

using OutputLabel = std::function<bool(const SimulationOutput&)>;

/// Simulates and labels each input without retaining the trajectories.
/// Failed simulations throw SimulationError.
std::vector<std::uint8_t> label_inputs_serial(Simulator& sim, const ScenarioSpec& spec,
                                              const std::vector<TestInput>& inputs,
                                              std::uint64_t seed, const OutputLabel& label);
std::vector<std::uint8_t> label_inputs_omp(Simulator& sim, const ScenarioSpec& spec,
                                           const std::vector<TestInput>& inputs,
                                           std::uint64_t seed, const OutputLabel& label,
                                           std::size_t threads);

/// Cell centres of a regular grid with `per_axis` cells along every axis,
/// last axis varying fastest.
std::vector<TestInput> grid_cell_centres(const Box& box, std::size_t per_axis);

/// Pairwise Pareto dominance (minimisation) over m points: for each point,
/// how many points dominate it and which points it dominates (ascending).
struct DominanceTable {
  std::vector<std::size_t> dominated_by_count;
  std::vector<std::vector<std::size_t>> dominates;
};

DominanceTable dominance_table_serial(const std::vector<std::vector<double>>& objectives);
DominanceTable dominance_table_omp(const std::vector<std::vector<double>>& objectives,
                                   std::size_t threads);

bool dominates(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sbt::kernels
