#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sbt/cart.hpp"
#include "sbt/nsga2.hpp"
#include "sbt/problem.hpp"
#include "sbt/record.hpp"

namespace sbt {

struct SearchConfig {
  std::size_t population_size = 50;
  std::size_t max_generations = 20;
  std::optional<std::chrono::duration<double>> time_budget;
  double crossover_probability = 0.9;
  double crossover_eta = 15.0;
  std::optional<double> mutation_probability;  // defaults to 1/d
  double mutation_eta = 20.0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  std::vector<std::string> validate() const;
  double mutation_probability_for(std::size_t dimension) const {
    return mutation_probability.value_or(1.0 / static_cast<double>(dimension));
  }
};

/// Knobs of the tree-guided outer loop.
struct DtConfig {
  std::size_t inner_generations = 5;
  CartParams cart{};
  double critical_leaf_fraction = 0.5;
  std::size_t min_leaf_samples = 5;
  bool seed_from_archive = true;
  std::size_t max_iterations = 0;  // 0 = until the evaluation budget is spent

  std::vector<std::string> validate() const;
};

/// State of one outer NSGAII-DT iteration after its tree was fitted.
struct DtIteration {
  std::size_t iteration = 0;
  std::size_t evaluations = 0;  // archive size when the tree was fitted
  std::vector<Box> searched_regions;
  DecisionTree tree;
  std::vector<Region> critical_regions;  // next iteration's active regions
};

struct OptimizerResult {
  std::vector<EvaluationRecord> archive;
  std::vector<Individual> final_population;
  std::vector<std::size_t> pareto_set;    // archive indices
  std::vector<std::size_t> critical_set;  // archive indices
  std::size_t iterations_run = 0;
  std::chrono::duration<double> wall_time{0};
  std::vector<DtIteration> dt_iterations;
};

/// Raised when a simulation fails mid-search. Carries the archive built so far
/// so callers can flush it before reporting.
class SearchAborted : public SimulationError {
 public:
  SearchAborted(const SimulationError& cause, std::vector<EvaluationRecord> archive)
      : SimulationError(cause), archive_(std::move(archive)) {}
  const std::vector<EvaluationRecord>& archive() const { return archive_; }

 private:
  std::vector<EvaluationRecord> archive_;
};

/// Simulates, scores and archives batches of inputs. Every call appends each
/// input to the archive exactly once.
class Evaluator {
 public:
  Evaluator(const AdasProblem& problem, std::uint64_t seed, std::size_t workers);

  /// Throws SimulationError for the first failed position (in order).
  std::vector<Individual> evaluate(const std::vector<TestInput>& inputs);

  std::size_t evaluations() const { return archive_.size(); }
  const std::vector<EvaluationRecord>& archive() const { return archive_; }
  std::vector<EvaluationRecord> take_archive() { return std::move(archive_); }

  /// Individual view of an archived record.
  Individual individual(std::size_t record) const;

 private:
  const AdasProblem& problem_;
  std::uint64_t seed_;
  std::size_t workers_;
  std::vector<EvaluationRecord> archive_;
};

/// Archive indices whose minimisation vectors nobody in the archive dominates.
std::vector<std::size_t> pareto_indices(const std::vector<EvaluationRecord>& archive,
                                        const std::vector<Direction>& directions);

/// Optimiser contract: configure with init, then run once.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void init(const AdasProblem& problem, const SearchConfig& config) = 0;
  virtual OptimizerResult run() = 0;
};

class Nsga2Optimizer : public Optimizer {
 public:
  void init(const AdasProblem& problem, const SearchConfig& config) override;
  OptimizerResult run() override;

 private:
  const AdasProblem* problem_ = nullptr;
  SearchConfig config_;
};

class Nsga2DtOptimizer : public Optimizer {
 public:
  explicit Nsga2DtOptimizer(DtConfig dt = {}) : dt_(dt) {}
  void init(const AdasProblem& problem, const SearchConfig& config) override;
  /// The evaluation budget is population_size * (max_generations + 1), the
  /// same as a plain NSGA-II run with the same config.
  OptimizerResult run() override;

 private:
  const AdasProblem* problem_ = nullptr;
  SearchConfig config_;
  DtConfig dt_;
};

OptimizerResult nsga2_run(const AdasProblem& problem, const SearchConfig& config);
OptimizerResult nsgaii_dt_run(const AdasProblem& problem, const SearchConfig& config,
                              const DtConfig& dt);

/// Active regions derived from a tree: leaves whose critical fraction is at
/// least `critical_leaf_fraction` and that hold at least `min_leaf_samples`
/// points, identical boxes merged. Falls back to the full box when none.
std::vector<Box> active_regions(const DecisionTree& tree, const DtConfig& dt,
                                std::vector<Region>* critical_out = nullptr);

}  // namespace sbt
