#pragma once

// External-simulator bridge. The child process reads one JSON request per
// line on stdin and answers with one JSON response per line on stdout:
//
//   request:  {"id": int, "scenario": string, "parameters": {name: number},
//              "dt": number, "seed": int}
//   response: {"id": int, "dt": number,
//              "actors": {name: [[t, x, y, yaw, speed], ...]},
//              "collision": bool, "collision_time": number | null,
//              "metadata": {string: string}}

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <string>

#include "sbt/simulation.hpp"

namespace sbt {

namespace bridge {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// dt taken from the spec's fixed settings, 0.01 s otherwise.
double request_dt(const ScenarioSpec& spec);

nlohmann::json make_request(std::int64_t id, const ScenarioSpec& spec, const TestInput& input,
                            std::uint64_t seed);

/// Response-schema JSON for an output (also the trajectory export format).
nlohmann::json encode_output(const SimulationOutput& output, std::int64_t id);

/// Parses and validates a response object. Throws ProtocolError.
SimulationOutput decode_output(const nlohmann::json& response);

/// Parses one response line. Throws ProtocolError.
std::pair<std::int64_t, SimulationOutput> decode_response_line(const std::string& line);

}  // namespace bridge

/// A child process driven over its stdin/stdout pipes.
class ChildProcess {
 public:
  /// Runs `command` through /bin/sh -c.
  explicit ChildProcess(const std::string& command);
  ~ChildProcess();
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  /// Throws ProtocolError("backend terminated ...") if the pipe is closed.
  void write_line(const std::string& line);
  /// Returns nullopt on timeout. Throws ProtocolError("backend terminated")
  /// on end of stream.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);
  bool alive();

 private:
  void terminate();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// Backend that forwards every simulation to an external command. A single
/// child serves `simulate`; `simulate_batch` gives each pool worker its own.
class SubprocessSimulator final : public Simulator {
 public:
  explicit SubprocessSimulator(std::string command,
                               std::chrono::milliseconds timeout = std::chrono::seconds(60));
  ~SubprocessSimulator() override;

  std::string id() const override { return "subprocess:" + command_; }

  SimulationOutput simulate(const ScenarioSpec& spec, const TestInput& input,
                            std::uint64_t seed) override;

  std::vector<BatchItem> simulate_batch(const ScenarioSpec& spec,
                                        const std::vector<TestInput>& inputs,
                                        std::uint64_t seed, std::size_t workers) override;

 private:
  struct Channel {
    std::unique_ptr<ChildProcess> child;
    std::map<std::int64_t, SimulationOutput> early;  // responses for other ids
  };

  SimulationOutput exchange(Channel& channel, const ScenarioSpec& spec, const TestInput& input,
                            std::uint64_t seed);

  std::string command_;
  std::chrono::milliseconds timeout_;
  std::atomic<std::int64_t> next_id_{0};
  std::mutex single_mutex_;
  Channel single_;
};

}  // namespace sbt
