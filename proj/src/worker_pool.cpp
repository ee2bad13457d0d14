#include "sbt/worker_pool.hpp"

#include <stdexcept>
#include <thread>

namespace sbt {

std::vector<BatchItem> evaluate_pool(std::vector<EvaluationJob> jobs, std::size_t workers,
                                     const JobRunner& run) {
  if (workers < 1) throw std::invalid_argument("evaluate_pool: workers must be >= 1");
  std::vector<BatchItem> results(jobs.size());
  if (jobs.empty()) return results;
  std::vector<bool> seen(jobs.size(), false);
  for (const auto& job : jobs) {
    if (job.index >= jobs.size() || seen[job.index])
      throw std::invalid_argument("evaluate_pool: job indices must be dense and unique");
    seen[job.index] = true;
  }

  JobQueue queue(std::move(jobs));
  auto worker = [&](std::size_t id) {
    while (auto job = queue.pop()) {
      BatchItem& slot = results[job->index];
      try {
        slot.output = run(*job, id);
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
    }
  };

  const std::size_t n = std::min(workers, results.size());
  if (n == 1) {
    worker(0);
    return results;
  }
  std::vector<std::jthread> threads;
  threads.reserve(n);
  for (std::size_t id = 0; id < n; ++id) threads.emplace_back(worker, id);
  threads.clear();
  return results;
}

}  // namespace sbt
