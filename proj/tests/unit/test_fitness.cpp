#include <doctest.h>

#include <cmath>
#include <limits>

#include "sbt/aeb_world.hpp"
#include "sbt/fitness.hpp"
#include "sbt/problem.hpp"

using namespace sbt;

namespace {

SimulationOutput trace(const std::vector<ActorState>& ego, const std::vector<ActorState>& ped,
                       double dt = 0.1) {
  SimulationOutput out;
  out.dt = dt;
  out.actors["ego"] = ego;
  out.actors["pedestrian"] = ped;
  return out;
}

// Independent oracle: enumerate every step, keep the first minimum.
std::pair<double, double> brute_min_distance(const SimulationOutput& out, double radius) {
  const auto& e = out.actor("ego");
  const auto& p = out.actor("pedestrian");
  std::vector<double> d(e.size());
  for (std::size_t k = 0; k < e.size(); ++k)
    d[k] = std::sqrt((e[k].x - p[k].x) * (e[k].x - p[k].x) + (e[k].y - p[k].y) * (e[k].y - p[k].y));
  const double m = *std::min_element(d.begin(), d.end());
  std::size_t first = 0;
  while (d[first] != m) ++first;
  return {out.collision ? 0.0 : std::max(0.0, m - radius), e[first].speed};
}

// Independent oracle: per-step relative velocity from yaw and speed.
double brute_ttc(const SimulationOutput& out, double radius) {
  const auto& e = out.actor("ego");
  const auto& p = out.actor("pedestrian");
  double best = kNoTtc;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double dx = p[k].x - e[k].x, dy = p[k].y - e[k].y;
    const double dist = std::sqrt(dx * dx + dy * dy);
    const double rvx = p[k].speed * std::cos(p[k].yaw) - e[k].speed * std::cos(e[k].yaw);
    const double rvy = p[k].speed * std::sin(p[k].yaw) - e[k].speed * std::sin(e[k].yaw);
    const double closing = -(dx * rvx + dy * rvy) / dist;
    if (closing > 0) best = std::min(best, (dist - radius) / closing);
  }
  return best;
}

}  // namespace

TEST_CASE("static actors 6 m apart") {
  std::vector<ActorState> ego, ped;
  for (int k = 0; k < 5; ++k) {
    ego.push_back({k * 0.1, 0, 0, 0, 0});
    ped.push_back({k * 0.1, 6, 0, 0, 0});
  }
  const auto r = eval_min_distance_velocity(trace(ego, ped), 1.0);
  CHECK(r.min_distance == 5.0);
  CHECK(r.velocity_at_min == 0.0);
}

TEST_CASE("lateral pass at 10 m/s") {
  std::vector<ActorState> ego, ped;
  for (int k = 0; k <= 40; ++k) {
    ego.push_back({k * 0.1, -20.0 + k * 1.0, 0, 0, 10.0});
    ped.push_back({k * 0.1, 0.0, 3.0, 0, 0});
  }
  const auto out = trace(ego, ped);
  const auto r = eval_min_distance_velocity(out, 1.0);
  const auto [f1, f2] = brute_min_distance(out, 1.0);
  CHECK(r.min_distance == doctest::Approx(2.0));
  CHECK(r.velocity_at_min == 10.0);
  CHECK(r.min_distance == f1);
  CHECK(r.velocity_at_min == f2);
}

TEST_CASE("recorded collision forces F1 = 0") {
  std::vector<ActorState> ego{{0, 0, 0, 0, 5}, {0.1, 0.5, 0, 0, 5}};
  std::vector<ActorState> ped{{0, 3, 0, 0, 0}, {0.1, 3, 0, 0, 0}};
  auto out = trace(ego, ped);
  out.collision = true;
  out.collision_time = 0.1;
  CHECK(eval_min_distance_velocity(out, 1.0).min_distance == 0.0);
}

TEST_CASE("ties keep the earliest step") {
  std::vector<ActorState> ego{{0, 0, 0, 0, 7}, {0.1, 0, 0, 0, 3}};
  std::vector<ActorState> ped{{0, 4, 0, 0, 0}, {0.1, 4, 0, 0, 0}};
  CHECK(eval_min_distance_velocity(trace(ego, ped), 1.0).velocity_at_min == 7.0);
}

TEST_CASE("missing actor is an evaluation error") {
  SimulationOutput out;
  out.dt = 0.1;
  out.actors["ego"] = {{0, 0, 0, 0, 0}};
  CHECK_THROWS_AS(eval_min_distance_velocity(out, 1.0), EvaluationError);
  CHECK_THROWS_AS(eval_min_ttc(out, 1.0), EvaluationError);
}

TEST_CASE("min distance matches the oracle on simulated traces") {
  BuiltinAebSimulator sim;
  const auto spec = pedestrian_crossing_spec();
  for (const auto& x : sample_uniform(spec, 300, 17)) {
    const auto out = sim.simulate(spec, x, 0);
    const auto r = eval_min_distance_velocity(out, 1.0);
    const auto [f1, f2] = brute_min_distance(out, 1.0);
    CHECK(r.min_distance == doctest::Approx(f1).epsilon(1e-12));
    CHECK(r.velocity_at_min == f2);
    CHECK(r.min_distance >= 0.0);
    CHECK((r.min_distance == 0.0) == out.collision);
    bool present = false;
    for (const auto& s : out.actor("ego")) present = present || s.speed == r.velocity_at_min;
    CHECK(present);
  }
}

TEST_CASE("TTC with constant closing") {
  std::vector<ActorState> ego, ped;
  for (int k = 0; k < 3; ++k) {
    ego.push_back({k * 0.1, k * 1.0, 0, 0, 10.0});
    ped.push_back({k * 0.1, 100.0, 0, 0, 0});
  }
  // first step: gap 100 - 1 = 99 at 10 m/s; last: 97 at 10 m/s
  CHECK(eval_min_ttc(trace(ego, ped), 1.0) == doctest::Approx(9.7));

  std::vector<ActorState> e2{{0, 0, 0, 0, 10}}, p2{{0, 21, 0, 0, 0}};
  CHECK(eval_min_ttc(trace(e2, p2), 1.0) == doctest::Approx(2.0));
}

TEST_CASE("TTC sentinel when receding") {
  std::vector<ActorState> ego{{0, 0, 0, M_PI, 5}, {0.1, -0.5, 0, M_PI, 5}};
  std::vector<ActorState> ped{{0, 10, 0, 0, 1}, {0.1, 10.1, 0, 0, 1}};
  CHECK(eval_min_ttc(trace(ego, ped), 1.0) == kNoTtc);
}

TEST_CASE("TTC over a closing then receding trace matches the oracle") {
  std::vector<ActorState> ego, ped;
  double x = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double v = k < 5 ? 10.0 - k : 0.0;
    const double yaw = k < 7 ? 0.0 : M_PI;
    ego.push_back({k * 0.1, x, 0, yaw, k < 7 ? v : 2.0});
    ped.push_back({k * 0.1, 30.0, 0.5 * k, M_PI / 2, 1.0});
    x += v * 0.1;
  }
  const auto out = trace(ego, ped);
  CHECK(eval_min_ttc(out, 1.0) == doctest::Approx(brute_ttc(out, 1.0)).epsilon(1e-12));
  CHECK(eval_min_ttc(out, 1.0) < kNoTtc);
}

TEST_CASE("criticality predicate") {
  const SimulationOutput none;
  CHECK(is_critical({0.0, 3.2}, none));
  CHECK_FALSE(is_critical({0.01, 3.2}, none));
  CHECK_FALSE(is_critical({0.0, 0.0}, none));
}

TEST_CASE("minimization orientation") {
  const std::vector<Direction> mm{Direction::Minimize, Direction::Maximize};
  CHECK(to_minimization({2, 5}, mm) == std::vector<double>{2, -5});
  CHECK(to_minimization({2, 5}, {Direction::Minimize, Direction::Minimize}) ==
        std::vector<double>{2, 5});
  CHECK(to_minimization(to_minimization({2, 5}, mm), mm) != to_minimization({2, 5}, mm));
  CHECK_THROWS_AS(to_minimization({1}, mm), std::invalid_argument);
}

TEST_CASE("smaller F1 and larger F2 dominates after orientation") {
  const std::vector<Direction> mm{Direction::Minimize, Direction::Maximize};
  const auto a = to_minimization({0.5, 9}, mm);
  const auto b = to_minimization({1.5, 4}, mm);
  CHECK(a[0] < b[0]);
  CHECK(a[1] < b[1]);
}

TEST_CASE("fitness registry") {
  const auto f = make_fitness("min_distance_velocity", 1.0);
  CHECK(f.objective_names == std::vector<std::string>{"F1", "F2"});
  CHECK(f.directions.size() == f.objective_count());
  CHECK(make_fitness("min_ttc", 1.0).objective_count() == 1);
  CHECK_THROWS(make_fitness("nope", 1.0));
  CHECK(make_critical("adas_distance_velocity").predicate({0.0, 1.0}, SimulationOutput{}));
  CHECK_THROWS(make_critical("nope"));
}
