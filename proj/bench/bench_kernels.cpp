// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include "sbt/aeb_world.hpp"
#include "sbt/fitness.hpp"
#include "sbt/kernels.hpp"
#include "sbt/problem.hpp"

namespace {

using namespace sbt;

const ScenarioSpec& spec() {
  static const ScenarioSpec s = pedestrian_crossing_spec();
  return s;
}

const std::vector<TestInput>& grid() {
  static const auto g = kernels::grid_cell_centres(spec().bounds(), 12);
  return g;
}

std::vector<std::vector<double>> random_objectives(std::size_t m) {
  Rng rng(1);
  std::vector<std::vector<double>> objs(m, std::vector<double>(2));
  for (auto& o : objs)
    for (auto& v : o) v = rng.uniform();
  return objs;
}

bool label(const SimulationOutput& o) {
  static const auto fitness = make_fitness("min_distance_velocity", 1.0);
  return is_critical(fitness.evaluate(o), o);
}

void BM_LabelSerial(benchmark::State& state) {
  BuiltinAebSimulator sim;
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::label_inputs_serial(sim, spec(), grid(), 0, label));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid().size()));
}

void BM_LabelOmp(benchmark::State& state) {
  BuiltinAebSimulator sim;
  const auto threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::label_inputs_omp(sim, spec(), grid(), 0, label, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid().size()));
}

void BM_DominanceSerial(benchmark::State& state) {
  const auto objs = random_objectives(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dominance_table_serial(objs));
}

void BM_DominanceOmp(benchmark::State& state) {
  const auto objs = random_objectives(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dominance_table_omp(objs, 4));
}

}  // namespace

BENCHMARK(BM_LabelSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LabelOmp)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DominanceSerial)->Arg(100)->Arg(1000);
BENCHMARK(BM_DominanceOmp)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
