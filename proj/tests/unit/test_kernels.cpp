#include <doctest.h>

#include "sbt/aeb_world.hpp"
#include "sbt/fitness.hpp"
#include "sbt/kernels.hpp"
#include "sbt/problem.hpp"

using namespace sbt;

TEST_CASE("grid cell centres") {
  const Box box{{0, 1}, {10, 20}};
  const auto g = kernels::grid_cell_centres(box, 2);
  REQUIRE(g.size() == 4);
  CHECK(g[0].values == std::vector<double>{0.25, 12.5});
  CHECK(g[1].values == std::vector<double>{0.25, 17.5});
  CHECK(g[3].values == std::vector<double>{0.75, 17.5});
}

TEST_CASE("serial and parallel kernels agree") {
  BuiltinAebSimulator sim;
  const auto spec = pedestrian_crossing_spec();
  const auto inputs = kernels::grid_cell_centres(spec.bounds(), 6);
  const auto a = kernels::simulate_batch_serial(sim, spec, inputs, 1);
  const auto b = kernels::simulate_batch_omp(sim, spec, inputs, 1, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i].output == *b[i].output);

  const auto fitness = make_fitness("min_distance_velocity", 1.0);
  const kernels::OutputLabel label = [&](const SimulationOutput& o) {
    return is_critical(fitness.evaluate(o), o);
  };
  CHECK(kernels::label_inputs_serial(sim, spec, inputs, 1, label) ==
        kernels::label_inputs_omp(sim, spec, inputs, 1, label, 4));
}

TEST_CASE("kernel failures stay in their slot") {
  BuiltinAebSimulator sim;
  const auto spec = pedestrian_crossing_spec();
  const std::vector<TestInput> inputs{{{1, 5, 5}}, {{9, 5, 5}}, {{1, 6, 5}}};
  for (const auto& items : {kernels::simulate_batch_serial(sim, spec, inputs, 0),
                            kernels::simulate_batch_omp(sim, spec, inputs, 0, 2)}) {
    CHECK(items[0].ok());
    CHECK_FALSE(items[1].ok());
    CHECK(items[2].ok());
  }
}
