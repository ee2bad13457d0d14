#include <doctest.h>

#include <cmath>

#include "sbt/aeb_world.hpp"
#include "sbt/problem.hpp"
#include "sbt/worker_pool.hpp"

using namespace sbt;

namespace {

SimulationOutput run(double ped_speed, double ego_speed, double ped_dist) {
  BuiltinAebSimulator sim;
  return sim.simulate(pedestrian_crossing_spec(), TestInput{{ped_speed, ego_speed, ped_dist}}, 0);
}

WorldState cruising(double speed) {
  AebWorldConfig config;
  WorldState s = initial_world(config, AebInputs{1.0, speed, 0.0});
  s.ego_speed = speed;
  return s;
}

double path_length(const std::vector<ActorState>& traj) {
  double len = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k)
    len += std::hypot(traj[k].x - traj[k - 1].x, traj[k].y - traj[k - 1].y);
  return len;
}

}  // namespace

TEST_CASE("Euler step without brake") {
  AebWorldConfig config;
  const AebInputs in{1.0, 10.0, 0.0};
  const WorldState next = step_builtin_world(cruising(10.0), config, in);
  CHECK(next.ego.x == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(next.ego_speed == 10.0);
}

TEST_CASE("Euler step with brake active") {
  AebWorldConfig config;
  WorldState s = cruising(10.0);
  s.brake_request_step = -100;
  WorldState next = step_builtin_world(s, config, AebInputs{1.0, 10.0, 0.0});
  CHECK(next.ego_speed == doctest::Approx(9.92).epsilon(1e-12));

  s = cruising(0.05);
  s.brake_request_step = -100;
  next = step_builtin_world(s, config, AebInputs{1.0, 0.05, 0.0});
  CHECK(next.ego_speed == 0.0);
  CHECK(next.ego.x == doctest::Approx(0.0005).epsilon(1e-12));
}

TEST_CASE("pedestrian never triggered with PedDist 0") {
  const auto out = run(1.0, 10.0, 0.0);
  CHECK_FALSE(out.collision);
  for (const auto& p : out.actor("pedestrian")) {
    CHECK(p.x == 80.0);
    CHECK(p.y == 4.0);
  }
}

TEST_CASE("slow ego stops in time") {
  const double v = 1.0, a = 8.0, react = 0.1;
  const double stopping = v * react + v * v / (2 * a);
  CHECK(stopping < 0.2);
  CHECK_FALSE(run(0.5, 1.0, 60.0).collision);
}

TEST_CASE("simulation is deterministic") {
  CHECK(run(1.3, 17.0, 35.0) == run(1.3, 17.0, 35.0));
}

TEST_CASE("outputs satisfy the trajectory contract") {
  const auto spec = pedestrian_crossing_spec();
  for (const auto& x : sample_uniform(spec, 200, 11)) {
    const auto out = run(x.values[0], x.values[1], x.values[2]);
    CHECK(validate_output(out).empty());
    CHECK(out.actors.size() == 2);
  }
}

TEST_CASE("collision detection uses a strict radius") {
  SimulationOutput out;
  out.dt = 0.1;
  out.actors["ego"] = {{0.0, 0, 0, 0, 0}, {0.1, 10, 0, 0, 0}};
  out.actors["pedestrian"] = {{0.0, 20, 0, 0, 0}, {0.1, 10.5, 0, 0, 0}};
  REQUIRE(detect_collision(out, 1.0).has_value());
  CHECK(*detect_collision(out, 1.0) == 0.1);

  out.actors["pedestrian"][1].x = 11.0;
  CHECK_FALSE(detect_collision(out, 1.0).has_value());
  out.actors["pedestrian"][1].x = 13.0;
  CHECK_FALSE(detect_collision(out, 1.0).has_value());
}

TEST_CASE("simulation halts at the first collision") {
  const auto spec = pedestrian_crossing_spec();
  std::size_t collisions = 0;
  for (const auto& x : sample_uniform(spec, 400, 21)) {
    const auto out = run(x.values[0], x.values[1], x.values[2]);
    if (!out.collision) continue;
    ++collisions;
    REQUIRE(out.collision_time.has_value());
    CHECK(out.actor("ego").back().t == *out.collision_time);
    CHECK(detect_collision(out, 1.0) == out.collision_time);
  }
  CHECK(collisions > 0);
}

TEST_CASE("physical sanity") {
  const auto spec = pedestrian_crossing_spec();
  for (const auto& x : sample_uniform(spec, 300, 4)) {
    const auto out = run(x.values[0], x.values[1], x.values[2]);
    const auto& ego = out.actor("ego");
    bool braking = false;
    for (std::size_t k = 1; k < ego.size(); ++k) {
      CHECK(ego[k].x >= ego[k - 1].x);
      if (ego[k].speed < ego[k - 1].speed) braking = true;
      if (braking) CHECK(ego[k].speed <= ego[k - 1].speed);
      CHECK(ego[k].speed >= 0.0);
    }
    CHECK(path_length(out.actor("pedestrian")) <= 8.0 + x.values[0] * 0.01 + 1e-9);
  }
}

TEST_CASE("monotone criticality at mid-range") {
  const auto problem = make_pedestrian_crossing_problem();
  auto collides = [&](double v) {
    const auto out = run(1.75, v, 30.0);
    return out.collision;
  };
  for (double v = 1.0; v + 2.0 <= 22.0; v += 1.0)
    if (collides(v)) CHECK(collides(v + 2.0));
}

TEST_CASE("fixed settings override the world") {
  auto spec = pedestrian_crossing_spec();
  spec.fixed_settings["dt"] = 0.02;
  BuiltinAebSimulator sim;
  const auto out = sim.simulate(spec, TestInput{{1.0, 10.0, 20.0}}, 0);
  CHECK(out.dt == 0.02);
  spec.fixed_settings["bogus"] = 1.0;
  CHECK_THROWS_AS(sim.simulate(spec, TestInput{{1.0, 10.0, 20.0}}, 0), SimulationError);
}

TEST_CASE("out-of-bounds input is a simulation error carrying the input") {
  BuiltinAebSimulator sim;
  try {
    sim.simulate(pedestrian_crossing_spec(), TestInput{{9.0, 10.0, 20.0}}, 0);
    FAIL("expected SimulationError");
  } catch (const SimulationError& e) {
    CHECK(e.input().values[0] == 9.0);
  }
}

TEST_CASE("batch order and worker independence") {
  BuiltinAebSimulator sim;
  const auto spec = pedestrian_crossing_spec();
  CHECK(sim.simulate_batch(spec, {}, 0, 4).empty());

  const auto inputs = sample_uniform(spec, 8, 8);
  const auto serial = sim.simulate_batch(spec, inputs, 3, 1);
  const auto parallel = sim.simulate_batch(spec, inputs, 3, 4);
  REQUIRE(serial.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    REQUIRE(serial[i].ok());
    REQUIRE(parallel[i].ok());
    CHECK(*serial[i].output == *parallel[i].output);
  }

  const auto ab = sim.simulate_batch(spec, {inputs[0], inputs[1]}, 3, 2);
  const auto ba = sim.simulate_batch(spec, {inputs[1], inputs[0]}, 3, 2);
  CHECK(*ab[0].output == *ba[1].output);
  CHECK(*ab[1].output == *ba[0].output);
}

TEST_CASE("worker pool keeps submission order and isolates failures") {
  std::vector<EvaluationJob> jobs;
  for (std::size_t i = 0; i < 64; ++i) jobs.push_back({i, TestInput{{double(i)}}, i});
  auto runner = [](const EvaluationJob& job, std::size_t) {
    if (job.index == 13) throw SimulationError("boom", job.input);
    SimulationOutput out;
    out.dt = 0.1;
    out.actors["ego"] = {{0.0, job.input.values[0], 0, 0, 0}};
    return out;
  };
  const auto one = evaluate_pool(jobs, 1, runner);
  const auto eight = evaluate_pool(jobs, 8, runner);
  REQUIRE(one.size() == 64);
  REQUIRE(eight.size() == 64);
  for (std::size_t i = 0; i < 64; ++i) {
    if (i == 13) {
      CHECK_FALSE(one[i].ok());
      CHECK_FALSE(eight[i].ok());
      CHECK(eight[i].error.find("boom") != std::string::npos);
      continue;
    }
    REQUIRE(eight[i].ok());
    CHECK(*one[i].output == *eight[i].output);
    CHECK(eight[i].output->actor("ego")[0].x == double(i));
  }
  CHECK(evaluate_pool({}, 4, runner).empty());
  CHECK_THROWS_AS(evaluate_pool(jobs, 0, runner), std::invalid_argument);
}
