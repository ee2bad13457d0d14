#include "sbt/kernels.hpp"

#include <omp.h>

#include <exception>
#include <optional>
#include <string>

namespace sbt::kernels {

namespace {

BatchItem run_one(Simulator& sim, const ScenarioSpec& spec, const TestInput& input,
                  std::uint64_t seed) {
  BatchItem item;
  try {
    item.output = sim.simulate(spec, input, seed);
  } catch (const std::exception& e) {
    item.error = e.what();
  }
  return item;
}

}  // namespace

std::vector<BatchItem> simulate_batch_serial(Simulator& sim, const ScenarioSpec& spec,
                                             const std::vector<TestInput>& inputs,
                                             std::uint64_t seed) {
  std::vector<BatchItem> out(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) out[i] = run_one(sim, spec, inputs[i], seed);
  return out;
}

std::vector<BatchItem> simulate_batch_omp(Simulator& sim, const ScenarioSpec& spec,
                                          const std::vector<TestInput>& inputs,
                                          std::uint64_t seed, std::size_t threads) {
  std::vector<BatchItem> out(inputs.size());
  const long n = static_cast<long>(inputs.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(static_cast<int>(threads))
  for (long i = 0; i < n; ++i) out[i] = run_one(sim, spec, inputs[i], seed);
  return out;
}

std::vector<std::uint8_t> label_inputs_serial(Simulator& sim, const ScenarioSpec& spec,
                                              const std::vector<TestInput>& inputs,
                                              std::uint64_t seed, const OutputLabel& label) {
  std::vector<std::uint8_t> out(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i)
    out[i] = label(sim.simulate(spec, inputs[i], seed)) ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> label_inputs_omp(Simulator& sim, const ScenarioSpec& spec,
                                           const std::vector<TestInput>& inputs,
                                           std::uint64_t seed, const OutputLabel& label,
                                           std::size_t threads) {
  std::vector<std::uint8_t> out(inputs.size());
  std::vector<std::optional<SimulationError>> failures(inputs.size());
  const long n = static_cast<long>(inputs.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(static_cast<int>(threads))
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = label(sim.simulate(spec, inputs[i], seed)) ? 1 : 0;
    } catch (const SimulationError& e) {
      failures[i] = e;
    } catch (const std::exception& e) {
      failures[i] = SimulationError(e.what(), inputs[i]);
    }
  }
  for (auto& f : failures)
    if (f) throw *f;
  return out;
}

std::vector<TestInput> grid_cell_centres(const Box& box, std::size_t per_axis) {
  const std::size_t d = box.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= per_axis;
  std::vector<TestInput> out(total, TestInput{std::vector<double>(d)});
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t axis = d; axis-- > 0;) {
      const std::size_t cell = rest % per_axis;
      rest /= per_axis;
      out[flat].values[axis] = box[axis].lower + (static_cast<double>(cell) + 0.5) *
                                                     box[axis].width() /
                                                     static_cast<double>(per_axis);
    }
  }
  return out;
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strictly = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strictly = true;
  }
  return strictly;
}

DominanceTable dominance_table_serial(const std::vector<std::vector<double>>& objectives) {
  const std::size_t m = objectives.size();
  DominanceTable table{std::vector<std::size_t>(m, 0), std::vector<std::vector<std::size_t>>(m)};
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = 0; q < m; ++q) {
      if (p == q) continue;
      if (dominates(objectives[p], objectives[q])) table.dominates[p].push_back(q);
      else if (dominates(objectives[q], objectives[p])) ++table.dominated_by_count[p];
    }
  }
  return table;
}

DominanceTable dominance_table_omp(const std::vector<std::vector<double>>& objectives,
                                   std::size_t threads) {
  const long m = static_cast<long>(objectives.size());
  DominanceTable table{std::vector<std::size_t>(m, 0), std::vector<std::vector<std::size_t>>(m)};
  // Row p is owned by one thread, so rows can be filled without locking.
#pragma omp parallel for schedule(static) num_threads(static_cast<int>(threads))
  for (long p = 0; p < m; ++p) {
    for (long q = 0; q < m; ++q) {
      if (p == q) continue;
      if (dominates(objectives[p], objectives[q])) table.dominates[p].push_back(q);
      else if (dominates(objectives[q], objectives[p])) ++table.dominated_by_count[p];
    }
  }
  return table;
}

}  // namespace sbt::kernels
