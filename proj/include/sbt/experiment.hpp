#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbt/optimizer.hpp"

namespace sbt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { Nsga2, Nsga2Dt };

struct Experiment {
  std::string name;
  AdasProblem problem;
  Algorithm algorithm = Algorithm::Nsga2;
  SearchConfig search;
  std::optional<DtConfig> dt;
  CartParams analysis_cart{};
  std::size_t max_trajectories = 20;
};

/// Experiments in declaration order.
class ExperimentRegistry {
 public:
  /// Parses a registry file:
  ///
  ///   experiments:
  ///     - name: "1"
  ///       scenario: {path: ..., variables: [{name, lower, upper, unit}], fixed: {...}}
  ///       fitness: min_distance_velocity
  ///       criticality: adas_distance_velocity
  ///       simulator: builtin | "subprocess:<command>"
  ///       algorithm: NSGA2 | NSGA2DT
  ///       search: {population_size, max_generations, time, seed, workers, ...}
  ///       dt: {...}          # NSGA2DT only
  ///       analysis: {cart: {...}, max_trajectories}
  ///
  /// Throws ConfigError.
  static ExperimentRegistry load(const std::filesystem::path& path);
  static ExperimentRegistry parse(const std::string& yaml_text,
                                  const std::filesystem::path& base_dir = {});

  void add(Experiment experiment);

  /// By exact name, otherwise by 1-based position. Throws ConfigError listing
  /// the available experiments.
  const Experiment& find(const std::string& name_or_index) const;

  const std::vector<Experiment>& experiments() const { return experiments_; }
  std::string listing() const;

 private:
  std::vector<Experiment> experiments_;
};

/// Parses "HH:MM:SS" (hours may exceed 24). Throws ConfigError.
std::chrono::seconds parse_duration(const std::string& text);

/// <root>/<experiment>/<run_id>, created. Without an override the run id is a
/// timestamp, suffixed when that directory already exists. Throws IoError.
std::filesystem::path make_results_dir(const std::filesystem::path& root,
                                       const std::string& experiment,
                                       const std::optional<std::string>& run_id);

struct RunSummary {
  std::filesystem::path results_dir;
  std::size_t evaluations = 0;
  std::size_t critical = 0;
  std::size_t regions = 0;
  std::size_t iterations = 0;
  std::chrono::duration<double> wall_time{0};
};

/// Search, then write every analysis artifact into `results_dir`. On a
/// simulation failure the archive collected so far is written before the
/// SearchAborted is rethrown.
RunSummary run_experiment(const Experiment& experiment, const std::filesystem::path& results_dir,
                          std::ostream& log);

/// Writes the analysis artifacts of a finished search.
std::size_t write_analysis(const Experiment& experiment, const OptimizerResult& result,
                           const std::filesystem::path& results_dir, std::ostream& log);

}  // namespace sbt
