#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#include "sbt/simulation.hpp"

namespace sbt {

struct EvaluationJob {
  std::size_t index = 0;
  TestInput input;
  std::uint64_t seed = 0;
};

/// FIFO shared by the pool workers.
class JobQueue {
 public:
  explicit JobQueue(std::vector<EvaluationJob> jobs) : jobs_(jobs.begin(), jobs.end()) {}

  std::optional<EvaluationJob> pop() {
    std::lock_guard lock(mutex_);
    if (jobs_.empty()) return std::nullopt;
    EvaluationJob job = std::move(jobs_.front());
    jobs_.pop_front();
    return job;
  }

 private:
  std::mutex mutex_;
  std::deque<EvaluationJob> jobs_;
};

/// Called as run(job, worker_id); worker_id is in [0, workers).
using JobRunner = std::function<SimulationOutput(const EvaluationJob&, std::size_t)>;

/// Consumes `jobs` with `workers` threads and returns results ordered by
/// submission index. A throwing job leaves an error in its slot; the pool
/// keeps draining the queue.
std::vector<BatchItem> evaluate_pool(std::vector<EvaluationJob> jobs, std::size_t workers,
                                     const JobRunner& run);

}  // namespace sbt
