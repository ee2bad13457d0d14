#include "sbt/bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fmt/format.h>

#include "sbt/worker_pool.hpp"

namespace sbt {

using nlohmann::json;

namespace bridge {

double request_dt(const ScenarioSpec& spec) {
  auto it = spec.fixed_settings.find("dt");
  return it == spec.fixed_settings.end() ? 0.01 : it->second;
}

json make_request(std::int64_t id, const ScenarioSpec& spec, const TestInput& input,
                  std::uint64_t seed) {
  json params = json::object();
  for (std::size_t i = 0; i < spec.parameters.size(); ++i)
    params[spec.parameters[i].name] = input.values.at(i);
  return {{"id", id},
          {"scenario", spec.scenario_path},
          {"parameters", params},
          {"dt", request_dt(spec)},
          {"seed", seed}};
}

json encode_output(const SimulationOutput& output, std::int64_t id) {
  json actors = json::object();
  for (const auto& [name, traj] : output.actors) {
    json rows = json::array();
    for (const auto& s : traj) rows.push_back({s.t, s.x, s.y, s.yaw, s.speed});
    actors[name] = std::move(rows);
  }
  return {{"id", id},
          {"dt", output.dt},
          {"actors", std::move(actors)},
          {"collision", output.collision},
          {"collision_time", output.collision_time ? json(*output.collision_time) : json(nullptr)},
          {"metadata", output.metadata}};
}

SimulationOutput decode_output(const json& r) {
  SimulationOutput out;
  try {
    if (!r.is_object()) throw ProtocolError("response is not a JSON object");
    out.dt = r.at("dt").get<double>();
    for (const auto& [name, rows] : r.at("actors").items()) {
      auto& traj = out.actors[name];
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != 5)
          throw ProtocolError("trajectory rows must be [t, x, y, yaw, speed]");
        traj.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                        row[3].get<double>(), row[4].get<double>()});
      }
    }
    out.collision = r.at("collision").get<bool>();
    if (const auto& ct = r.at("collision_time"); !ct.is_null()) out.collision_time = ct.get<double>();
    if (r.contains("metadata"))
      out.metadata = r.at("metadata").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed response: ") + e.what());
  }
  if (auto errors = validate_output(out); !errors.empty()) throw ProtocolError(errors.front());
  return out;
}

std::pair<std::int64_t, SimulationOutput> decode_response_line(const std::string& line) {
  json r;
  try {
    r = json::parse(line);
    if (!r.is_object() || !r.contains("id")) throw ProtocolError("malformed response: missing id");
    return {r.at("id").get<std::int64_t>(), decode_output(r)};
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed response: ") + e.what());
  }
}

}  // namespace bridge

namespace {

void ignore_sigpipe() {
  static const bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

}  // namespace

ChildProcess::ChildProcess(const std::string& command) {
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw bridge::ProtocolError("pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw bridge::ProtocolError("pipe failed");
  }
  pid_ = ::fork();
  if (pid_ < 0) throw bridge::ProtocolError(std::string("fork failed: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::setpgid(0, 0);  // own group, so the shell and its children die together
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ChildProcess::~ChildProcess() { terminate(); }

void ChildProcess::terminate() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    // Closing stdin lets well-behaved children exit; give them a moment.
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        ::kill(-pid_, SIGKILL);  // stragglers forked by the shell
        pid_ = -1;
        return;
      }
      ::usleep(5000);
    }
    ::kill(-pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

bool ChildProcess::alive() {
  if (pid_ <= 0) return false;
  int status = 0;
  if (::waitpid(pid_, &status, WNOHANG) == pid_) {
    pid_ = -1;
    return false;
  }
  return true;
}

void ChildProcess::write_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw bridge::ProtocolError("backend terminated (write failed)");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> ChildProcess::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) return std::nullopt;
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw bridge::ProtocolError("backend terminated before responding");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

SubprocessSimulator::SubprocessSimulator(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

SubprocessSimulator::~SubprocessSimulator() = default;

SimulationOutput SubprocessSimulator::exchange(Channel& channel, const ScenarioSpec& spec,
                                               const TestInput& input, std::uint64_t seed) {
  if (auto errors = validate_input(spec, input); !errors.empty())
    throw SimulationError(errors.front(), input);
  const std::int64_t id = next_id_++;
  try {
    if (!channel.child || !channel.child->alive()) {
      channel.child = std::make_unique<ChildProcess>(command_);
      channel.early.clear();
    }
    channel.child->write_line(bridge::make_request(id, spec, input, seed).dump());
    for (;;) {
      if (auto it = channel.early.find(id); it != channel.early.end()) {
        SimulationOutput out = std::move(it->second);
        channel.early.erase(it);
        return out;
      }
      auto line = channel.child->read_line(timeout_);
      if (!line) {
        throw bridge::ProtocolError(
            fmt::format("timeout after {} ms waiting for response {}", timeout_.count(), id));
      }
      auto [rid, out] = bridge::decode_response_line(*line);
      if (rid == id) return out;
      channel.early.emplace(rid, std::move(out));
    }
  } catch (const bridge::ProtocolError& e) {
    channel.child.reset();  // stream state is unknown after a protocol error
    throw SimulationError(fmt::format("{} [{}]", e.what(), command_), input);
  }
}

SimulationOutput SubprocessSimulator::simulate(const ScenarioSpec& spec, const TestInput& input,
                                               std::uint64_t seed) {
  std::lock_guard lock(single_mutex_);
  return exchange(single_, spec, input, seed);
}

std::vector<BatchItem> SubprocessSimulator::simulate_batch(const ScenarioSpec& spec,
                                                           const std::vector<TestInput>& inputs,
                                                           std::uint64_t seed,
                                                           std::size_t workers) {
  workers = std::max<std::size_t>(1, workers);
  std::vector<Channel> channels(workers);
  std::vector<EvaluationJob> jobs;
  jobs.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) jobs.push_back({i, inputs[i], seed});
  return evaluate_pool(std::move(jobs), workers,
                       [&](const EvaluationJob& job, std::size_t worker) {
                         return exchange(channels[worker], spec, job.input, job.seed);
                       });
}

}  // namespace sbt
