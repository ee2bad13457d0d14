// Scripted NDJSON backend for bridge tests.
//
//   fake_sim builtin         answer with the built-in AEB world
//   fake_sim canned          constant trajectories, ego and pedestrian 6 m apart
//   fake_sim unequal         actors with different trajectory lengths
//   fake_sim exit            read one request, exit without answering
//   fake_sim hang            read one request, never answer
//   fake_sim garbage         answer with a line that is not JSON
//   fake_sim stray           answer a stale id before the real one
//   fake_sim fail-above <v>  exit when EgoSpeed > v, else behave like builtin

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "sbt/aeb_world.hpp"
#include "sbt/bridge.hpp"

using nlohmann::json;

namespace {

sbt::SimulationOutput builtin(const json& req) {
  sbt::AebWorldConfig config;
  config.dt = req.at("dt").get<double>();
  sbt::AebInputs in;
  const auto& p = req.at("parameters");
  in.ped_speed = p.at("PedSpeed").get<double>();
  in.ego_speed = p.at("EgoSpeed").get<double>();
  in.ped_trigger_dist = p.at("PedDist").get<double>();
  return sbt::run_aeb_world(config, in, req.at("seed").get<std::uint64_t>());
}

sbt::SimulationOutput canned(double dt) {
  sbt::SimulationOutput out;
  out.dt = dt;
  for (int k = 0; k < 4; ++k) {
    out.actors["ego"].push_back({k * dt, 0.0, 0.0, 0.0, 0.0});
    out.actors["pedestrian"].push_back({k * dt, 6.0, 0.0, 0.0, 0.0});
  }
  out.metadata["simulator"] = "canned";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "builtin";
  const double limit = argc > 2 ? std::atof(argv[2]) : 0.0;
  std::string line;
  while (std::getline(std::cin, line)) {
    const json req = json::parse(line);
    const auto id = req.at("id").get<std::int64_t>();
    if (mode == "exit") return 1;
    if (mode == "hang") {
      std::this_thread::sleep_for(std::chrono::hours(1));
      return 0;
    }
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    if (mode == "unequal") {
      json r = sbt::bridge::encode_output(canned(req.at("dt").get<double>()), id);
      r["actors"]["pedestrian"].erase(0);
      std::cout << r.dump() << std::endl;
      continue;
    }
    if (mode == "canned") {
      std::cout << sbt::bridge::encode_output(canned(req.at("dt").get<double>()), id).dump()
                << std::endl;
      continue;
    }
    if (mode == "fail-above" && req.at("parameters").at("EgoSpeed").get<double>() > limit)
      return 2;
    const auto out = builtin(req);
    if (mode == "stray") std::cout << sbt::bridge::encode_output(out, id + 1000).dump() << "\n";
    std::cout << sbt::bridge::encode_output(out, id).dump() << std::endl;
  }
  return 0;
}
