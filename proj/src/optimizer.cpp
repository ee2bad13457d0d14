#include "sbt/optimizer.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "sbt/kernels.hpp"

namespace sbt {

namespace {

using Clock = std::chrono::steady_clock;

class Budget {
 public:
  Budget(std::optional<std::chrono::duration<double>> time, std::size_t max_evaluations)
      : start_(Clock::now()), time_(time), max_evaluations_(max_evaluations) {}

  bool time_exceeded() const { return time_ && Clock::now() - start_ >= *time_; }
  std::size_t max_evaluations() const { return max_evaluations_; }
  std::chrono::duration<double> elapsed() const { return Clock::now() - start_; }

 private:
  Clock::time_point start_;
  std::optional<std::chrono::duration<double>> time_;
  std::size_t max_evaluations_;
};

void require_valid(const AdasProblem& problem, const SearchConfig& config) {
  if (auto errors = validate_problem(problem); !errors.empty())
    throw InvalidSpecError("invalid problem: " + errors.front());
  if (auto errors = config.validate(); !errors.empty())
    throw std::invalid_argument("invalid search config: " + errors.front());
}

std::vector<TestInput> make_offspring(const std::vector<Individual>& population, std::size_t count,
                                      const Box& box, const SearchConfig& config, Rng& rng) {
  const double pm = config.mutation_probability_for(box.size());
  std::vector<TestInput> out;
  out.reserve(count);
  while (out.size() < count) {
    const auto& a = population[crowded_tournament_select(population, rng)].input;
    const auto& b = population[crowded_tournament_select(population, rng)].input;
    auto [c1, c2] =
        sbx_crossover(a, b, config.crossover_eta, config.crossover_probability, box, rng);
    out.push_back(polynomial_mutation(c1, config.mutation_eta, pm, box, rng));
    if (out.size() < count) out.push_back(polynomial_mutation(c2, config.mutation_eta, pm, box, rng));
  }
  return out;
}

std::vector<Individual> concat(std::vector<Individual> a, std::vector<Individual> b) {
  a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
  return a;
}

OptimizerResult finish(const AdasProblem& problem, Evaluator& evaluator,
                       std::vector<Individual> population, std::size_t iterations,
                       const Budget& budget) {
  OptimizerResult result;
  result.archive = evaluator.take_archive();
  result.final_population = std::move(population);
  result.pareto_set = pareto_indices(result.archive, problem.objective_directions());
  for (const auto& r : result.archive)
    if (r.critical) result.critical_set.push_back(r.index);
  result.iterations_run = iterations;
  result.wall_time = budget.elapsed();
  return result;
}

}  // namespace

std::vector<std::string> SearchConfig::validate() const {
  std::vector<std::string> errors;
  if (population_size < 4 || population_size % 2 != 0)
    errors.emplace_back("population size must be even and at least 4");
  if (crossover_probability < 0.0 || crossover_probability > 1.0)
    errors.emplace_back("crossover probability must lie in [0, 1]");
  if (!(crossover_eta > 0.0)) errors.emplace_back("crossover eta must be positive");
  if (mutation_probability && (*mutation_probability < 0.0 || *mutation_probability > 1.0))
    errors.emplace_back("mutation probability must lie in [0, 1]");
  if (!(mutation_eta > 0.0)) errors.emplace_back("mutation eta must be positive");
  if (workers < 1) errors.emplace_back("workers must be at least 1");
  if (time_budget && time_budget->count() < 0.0) errors.emplace_back("time budget is negative");
  return errors;
}

std::vector<std::string> DtConfig::validate() const {
  std::vector<std::string> errors;
  if (critical_leaf_fraction < 0.0 || critical_leaf_fraction > 1.0)
    errors.emplace_back("critical leaf fraction must lie in [0, 1]");
  if (cart.min_samples_split < 2) errors.emplace_back("min_samples_split must be at least 2");
  return errors;
}

Evaluator::Evaluator(const AdasProblem& problem, std::uint64_t seed, std::size_t workers)
    : problem_(problem), seed_(seed), workers_(workers) {}

std::vector<Individual> Evaluator::evaluate(const std::vector<TestInput>& inputs) {
  const auto batch = problem_.simulator->simulate_batch(problem_.spec, inputs, seed_, workers_);
  std::optional<SimulationError> failure;
  std::vector<Individual> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!batch[i].ok()) {
      if (!failure) failure.emplace(batch[i].error, inputs[i]);
      continue;
    }
    const SimulationOutput& sim = *batch[i].output;
    EvaluationRecord record;
    record.index = archive_.size();
    record.input = inputs[i];
    record.seed = seed_;
    record.metadata = sim.metadata;
    try {
      record.objectives = problem_.fitness.evaluate(sim);
      if (record.objectives.size() != problem_.fitness.objective_count())
        throw EvaluationError("fitness returned the wrong number of objectives");
      record.critical = problem_.criticality.predicate(record.objectives, sim);
    } catch (const std::exception& e) {
      if (!failure) failure.emplace(std::string("fitness evaluation failed: ") + e.what(), inputs[i]);
      continue;
    }
    archive_.push_back(std::move(record));
    out.push_back(individual(archive_.size() - 1));
  }
  if (failure) throw *failure;
  return out;
}

Individual Evaluator::individual(std::size_t record) const {
  const EvaluationRecord& r = archive_[record];
  Individual ind;
  ind.input = r.input;
  ind.objectives = to_minimization(r.objectives, problem_.objective_directions());
  ind.critical = r.critical;
  ind.record = record;
  return ind;
}

std::vector<std::size_t> pareto_indices(const std::vector<EvaluationRecord>& archive,
                                        const std::vector<Direction>& directions) {
  std::vector<std::vector<double>> objectives;
  objectives.reserve(archive.size());
  for (const auto& r : archive) objectives.push_back(to_minimization(r.objectives, directions));
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < objectives.size(); ++p) {
    bool dominated = false;
    for (std::size_t q = 0; q < objectives.size() && !dominated; ++q)
      dominated = q != p && kernels::dominates(objectives[q], objectives[p]);
    if (!dominated) out.push_back(p);
  }
  return out;
}

void Nsga2Optimizer::init(const AdasProblem& problem, const SearchConfig& config) {
  require_valid(problem, config);
  problem_ = &problem;
  config_ = config;
}

OptimizerResult Nsga2Optimizer::run() {
  if (!problem_) throw std::logic_error("Nsga2Optimizer::run before init");
  const AdasProblem& problem = *problem_;
  const Box box = problem.spec.bounds();
  const std::size_t n = config_.population_size;
  Budget budget(config_.time_budget, n * (config_.max_generations + 1));
  Rng rng(config_.seed);
  Evaluator evaluator(problem, config_.seed, config_.workers);

  std::vector<Individual> population;
  std::size_t generation = 0;
  try {
    population = environmental_selection(evaluator.evaluate(sample_uniform(box, n, rng)), n);
    while (generation < config_.max_generations && !budget.time_exceeded()) {
      auto offspring = evaluator.evaluate(make_offspring(population, n, box, config_, rng));
      population = environmental_selection(concat(std::move(population), std::move(offspring)), n);
      ++generation;
    }
  } catch (const SimulationError& e) {
    throw SearchAborted(e, evaluator.take_archive());
  }
  return finish(problem, evaluator, std::move(population), generation, budget);
}

std::vector<Box> active_regions(const DecisionTree& tree, const DtConfig& dt,
                                std::vector<Region>* critical_out) {
  std::vector<Box> boxes;
  for (std::size_t leaf : tree.leaves()) {
    const TreeNode& node = tree.nodes[leaf];
    if (node.count_total < dt.min_leaf_samples) continue;
    if (node.critical_fraction() < dt.critical_leaf_fraction) continue;
    Region region = leaf_region(tree, leaf);
    const bool duplicate = std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) {
      return std::equal(b.begin(), b.end(), region.box.begin(), [](const Interval& x, const Interval& y) {
        return x.lower == y.lower && x.upper == y.upper;
      });
    });
    if (duplicate) continue;
    boxes.push_back(region.box);
    if (critical_out) critical_out->push_back(std::move(region));
  }
  if (boxes.empty()) boxes.push_back(tree.bounds);
  return boxes;
}

void Nsga2DtOptimizer::init(const AdasProblem& problem, const SearchConfig& config) {
  require_valid(problem, config);
  if (auto errors = dt_.validate(); !errors.empty())
    throw std::invalid_argument("invalid NSGAII-DT config: " + errors.front());
  problem_ = &problem;
  config_ = config;
}

OptimizerResult Nsga2DtOptimizer::run() {
  if (!problem_) throw std::logic_error("Nsga2DtOptimizer::run before init");
  const AdasProblem& problem = *problem_;
  const Box global = problem.spec.bounds();
  const std::size_t n = config_.population_size;
  Budget budget(config_.time_budget, n * (config_.max_generations + 1));
  Rng rng(config_.seed);
  Evaluator evaluator(problem, config_.seed, config_.workers);

  std::vector<Box> regions{global};
  std::vector<Individual> last_populations;
  std::vector<DtIteration> iterations;
  try {
    while (dt_.max_iterations == 0 || iterations.size() < dt_.max_iterations) {
      if (evaluator.evaluations() >= budget.max_evaluations() || budget.time_exceeded()) break;
      const std::size_t before = evaluator.evaluations();
      const std::size_t per_region = std::max<std::size_t>(4, (n / regions.size()) & ~std::size_t{1});

      std::vector<Individual> populations;
      for (const Box& region : regions) {
        const std::size_t remaining = budget.max_evaluations() - evaluator.evaluations();
        if (remaining == 0 || budget.time_exceeded()) break;

        std::vector<Individual> population;
        if (dt_.seed_from_archive) {
          for (const auto& r : evaluator.archive())
            if (box_contains(region, r.input.values)) population.push_back(evaluator.individual(r.index));
          population = environmental_selection(std::move(population), per_region);
        }
        const std::size_t fresh = std::min(per_region - population.size(), remaining);
        population = concat(std::move(population),
                            evaluator.evaluate(sample_uniform(region, fresh, rng)));
        if (population.size() < 2) {
          populations = concat(std::move(populations), std::move(population));
          continue;
        }
        population = environmental_selection(std::move(population), per_region);
        for (std::size_t g = 0; g < dt_.inner_generations; ++g) {
          if (evaluator.evaluations() + per_region > budget.max_evaluations() ||
              budget.time_exceeded())
            break;
          auto offspring =
              evaluator.evaluate(make_offspring(population, per_region, region, config_, rng));
          population =
              environmental_selection(concat(std::move(population), std::move(offspring)), per_region);
        }
        populations = concat(std::move(populations), std::move(population));
      }
      if (evaluator.evaluations() == before) break;

      DtIteration it;
      it.iteration = iterations.size();
      it.evaluations = evaluator.evaluations();
      it.searched_regions = regions;
      it.tree = fit_cart(evaluator.archive(), global, dt_.cart);
      regions = active_regions(it.tree, dt_, &it.critical_regions);
      iterations.push_back(std::move(it));
      last_populations = std::move(populations);
    }
  } catch (const SimulationError& e) {
    throw SearchAborted(e, evaluator.take_archive());
  }
  const std::size_t count = iterations.size();
  OptimizerResult result = finish(problem, evaluator, std::move(last_populations), count, budget);
  result.dt_iterations = std::move(iterations);
  return result;
}

OptimizerResult nsga2_run(const AdasProblem& problem, const SearchConfig& config) {
  Nsga2Optimizer opt;
  opt.init(problem, config);
  return opt.run();
}

OptimizerResult nsgaii_dt_run(const AdasProblem& problem, const SearchConfig& config,
                              const DtConfig& dt) {
  Nsga2DtOptimizer opt(dt);
  opt.init(problem, config);
  return opt.run();
}

}  // namespace sbt
