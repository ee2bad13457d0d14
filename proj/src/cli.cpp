#include "sbt/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <optional>

#include "sbt/experiment.hpp"
#include "sbt/export.hpp"

namespace sbt {

namespace {

std::string env_or(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Search-based testing of automated driving functions", "sbt"};
  std::string experiment_key;
  std::optional<std::size_t> population;
  std::optional<std::string> time_budget;
  std::optional<std::size_t> generations;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> run_id;
  std::string results_root = env_or("SBT_RESULTS_ROOT", "results");
  std::string registry_path = env_or("SBT_EXPERIMENTS", "experiments/registry.yaml");
  bool list = false;

  app.add_option("-e,--experiment", experiment_key, "Experiment name or registry index");
  app.add_option("-n,--population", population, "Population size");
  app.add_option("-t,--time", time_budget, "Search time budget HH:MM:SS");
  app.add_option("-i,--iterations", generations, "Maximum number of generations");
  app.add_option("-s,--seed", seed, "Random seed");
  app.add_option("-o,--output", results_root, "Results root directory");
  app.add_option("-c,--config", registry_path, "Experiment registry file");
  app.add_option("--workers", workers, "Parallel evaluation workers")->check(CLI::PositiveNumber);
  app.add_option("--run-id", run_id, "Run directory name (default: timestamp)");
  app.add_flag("--list", list, "List registered experiments");

  if (args.empty()) {
    out << app.help();
    return kExitConfig;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfig;
  }

  try {
    const ExperimentRegistry registry = ExperimentRegistry::load(registry_path);
    if (list) {
      out << registry.listing();
      return kExitOk;
    }
    if (experiment_key.empty()) {
      err << "error: -e <experiment> is required\n" << app.help();
      return kExitConfig;
    }
    Experiment experiment = registry.find(experiment_key);
    SearchConfig& search = experiment.search;
    if (population) search.population_size = *population;
    if (time_budget) search.time_budget = parse_duration(*time_budget);
    if (generations) search.max_generations = *generations;
    if (seed) search.seed = *seed;
    if (workers) search.workers = *workers;
    if (auto errors = search.validate(); !errors.empty())
      throw ConfigError("invalid search config: " + errors.front());

    const auto dir = make_results_dir(results_root, experiment.name, run_id);
    out << fmt::format("experiment {} ({}), population {}, {} generations, seed {}, {} worker(s)\n",
                       experiment.name, experiment.problem.problem_name, search.population_size,
                       search.max_generations, search.seed, search.workers);
    const RunSummary summary = run_experiment(experiment, dir, err);
    out << fmt::format(
        "{} evaluations, {} critical, {} critical region(s), {} iteration(s) in {:.1f} s\n"
        "results: {}\n",
        summary.evaluations, summary.critical, summary.regions, summary.iterations,
        summary.wall_time.count(), summary.results_dir.string());
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidSpecError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SimulationError& e) {
    std::string input;
    for (double v : e.input().values) input += fmt::format("{}{:.6f}", input.empty() ? "" : ", ", v);
    err << "simulation error: " << e.what() << "\n  input: [" << input << "]\n";
    return kExitBackend;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitBackend;
  }
}

}  // namespace sbt
