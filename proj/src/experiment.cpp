#include "sbt/experiment.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "sbt/aeb_world.hpp"
#include "sbt/bridge.hpp"
#include "sbt/export.hpp"

namespace sbt {

namespace fs = std::filesystem;

namespace {

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <class T>
T get(const YAML::Node& node, const char* key, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) throw ConfigError(fmt::format("{}: missing '{}'", where, key));
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: '{}' has the wrong type", where, key));
  }
}

template <class T>
T get_or(const YAML::Node& node, const char* key, T fallback, const std::string& where) {
  return node[key] ? get<T>(node, key, where) : fallback;
}

ScenarioSpec parse_scenario(const YAML::Node& node, const fs::path& base_dir,
                            const std::string& where) {
  check_keys(node, where, {"path", "variables", "fixed"});
  ScenarioSpec spec;
  spec.scenario_path = get<std::string>(node, "path", where);
  if (!is_logical_scenario_id(spec.scenario_path) && fs::path(spec.scenario_path).is_relative() &&
      !base_dir.empty())
    spec.scenario_path = (base_dir / spec.scenario_path).lexically_normal().string();
  const YAML::Node vars = node["variables"];
  if (!vars || !vars.IsSequence()) throw ConfigError(where + ": 'variables' must be a list");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string w = fmt::format("{}.variables[{}]", where, i);
    check_keys(vars[i], w, {"name", "lower", "upper", "unit"});
    spec.parameters.push_back({get<std::string>(vars[i], "name", w), get<double>(vars[i], "lower", w),
                               get<double>(vars[i], "upper", w),
                               get_or<std::string>(vars[i], "unit", "", w)});
  }
  if (const YAML::Node fixed = node["fixed"]; fixed && !fixed.IsNull()) {
    if (!fixed.IsMap()) throw ConfigError(where + ": 'fixed' must be a mapping");
    for (const auto& kv : fixed) {
      const auto key = kv.first.as<std::string>();
      try {
        spec.fixed_settings[key] = kv.second.as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError(fmt::format("{}: fixed setting '{}' is not a number", where, key));
      }
    }
  }
  if (auto errors = validate_spec(spec); !errors.empty())
    throw ConfigError(where + ": " + errors.front());
  return spec;
}

SearchConfig parse_search(const YAML::Node& node, const std::string& where) {
  SearchConfig c;
  if (!node) return c;
  check_keys(node, where,
             {"population_size", "max_generations", "time", "seed", "workers",
              "crossover_probability", "crossover_eta", "mutation_probability", "mutation_eta"});
  c.population_size = get_or<std::size_t>(node, "population_size", c.population_size, where);
  c.max_generations = get_or<std::size_t>(node, "max_generations", c.max_generations, where);
  if (node["time"]) c.time_budget = parse_duration(get<std::string>(node, "time", where));
  c.seed = get_or<std::uint64_t>(node, "seed", c.seed, where);
  c.workers = get_or<std::size_t>(node, "workers", c.workers, where);
  c.crossover_probability = get_or<double>(node, "crossover_probability", c.crossover_probability, where);
  c.crossover_eta = get_or<double>(node, "crossover_eta", c.crossover_eta, where);
  if (node["mutation_probability"]) c.mutation_probability = get<double>(node, "mutation_probability", where);
  c.mutation_eta = get_or<double>(node, "mutation_eta", c.mutation_eta, where);
  if (auto errors = c.validate(); !errors.empty()) throw ConfigError(where + ": " + errors.front());
  return c;
}

CartParams parse_cart(const YAML::Node& node, const std::string& where) {
  CartParams p;
  if (!node) return p;
  check_keys(node, where, {"max_depth", "min_samples_split", "min_impurity_decrease"});
  p.max_depth = get_or<std::size_t>(node, "max_depth", p.max_depth, where);
  p.min_samples_split = get_or<std::size_t>(node, "min_samples_split", p.min_samples_split, where);
  p.min_impurity_decrease = get_or<double>(node, "min_impurity_decrease", p.min_impurity_decrease, where);
  return p;
}

DtConfig parse_dt(const YAML::Node& node, const std::string& where) {
  DtConfig d;
  if (!node || node.IsNull()) return d;
  check_keys(node, where,
             {"inner_generations", "cart", "critical_leaf_fraction", "min_leaf_samples",
              "seed_from_archive", "max_iterations"});
  d.inner_generations = get_or<std::size_t>(node, "inner_generations", d.inner_generations, where);
  d.cart = parse_cart(node["cart"], where + ".cart");
  d.critical_leaf_fraction = get_or<double>(node, "critical_leaf_fraction", d.critical_leaf_fraction, where);
  d.min_leaf_samples = get_or<std::size_t>(node, "min_leaf_samples", d.min_leaf_samples, where);
  d.seed_from_archive = get_or<bool>(node, "seed_from_archive", d.seed_from_archive, where);
  d.max_iterations = get_or<std::size_t>(node, "max_iterations", d.max_iterations, where);
  if (auto errors = d.validate(); !errors.empty()) throw ConfigError(where + ": " + errors.front());
  return d;
}

std::shared_ptr<Simulator> parse_simulator(const std::string& text, double timeout_s,
                                           const std::string& where) {
  if (text == "builtin") return std::make_shared<BuiltinAebSimulator>();
  const std::string prefix = "subprocess:";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size()) {
    return std::make_shared<SubprocessSimulator>(
        text.substr(prefix.size()),
        std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000.0)));
  }
  throw ConfigError(fmt::format("{}: unknown simulator '{}' (builtin | subprocess:<command>)", where, text));
}

Experiment parse_experiment(const YAML::Node& node, const fs::path& base_dir, std::size_t position) {
  std::string where = fmt::format("experiments[{}]", position);
  check_keys(node, where,
             {"name", "problem_name", "scenario", "fitness", "criticality", "simulator",
              "simulator_timeout", "algorithm", "search", "dt", "analysis"});
  Experiment e;
  e.name = get<std::string>(node, "name", where);
  if (e.name.empty()) throw ConfigError(where + ": empty experiment name");
  where = fmt::format("experiment '{}'", e.name);

  AdasProblem& p = e.problem;
  p.problem_name = get_or<std::string>(node, "problem_name", e.name, where);
  const YAML::Node scenario = node["scenario"];
  if (!scenario) throw ConfigError(where + ": missing 'scenario'");
  p.spec = parse_scenario(scenario, base_dir, where + ".scenario");

  const auto simulator = get_or<std::string>(node, "simulator", "builtin", where);
  double radius = 1.0;
  if (simulator == "builtin") {
    try {
      const AebWorldConfig world = AebWorldConfig{}.with_overrides(p.spec.fixed_settings);
      if (auto errors = world.validate(); !errors.empty())
        throw ConfigError(where + ": " + errors.front());
      radius = world.collision_radius;
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
  } else if (auto it = p.spec.fixed_settings.find("collision_radius");
             it != p.spec.fixed_settings.end()) {
    radius = it->second;
  }
  try {
    p.fitness = make_fitness(get_or<std::string>(node, "fitness", "min_distance_velocity", where), radius);
    p.criticality = make_critical(get_or<std::string>(node, "criticality", "adas_distance_velocity", where));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(where + ": " + ex.what());
  }
  p.simulator = parse_simulator(simulator, get_or<double>(node, "simulator_timeout", 60.0, where), where);

  const auto algorithm = get_or<std::string>(node, "algorithm", "NSGA2", where);
  if (algorithm == "NSGA2") {
    e.algorithm = Algorithm::Nsga2;
    if (node["dt"]) throw ConfigError(where + ": 'dt' is only valid with algorithm NSGA2DT");
  } else if (algorithm == "NSGA2DT") {
    e.algorithm = Algorithm::Nsga2Dt;
    e.dt = parse_dt(node["dt"], where + ".dt");
  } else {
    throw ConfigError(fmt::format("{}: unknown algorithm '{}' (NSGA2 | NSGA2DT)", where, algorithm));
  }
  e.search = parse_search(node["search"], where + ".search");
  if (const YAML::Node analysis = node["analysis"]) {
    check_keys(analysis, where + ".analysis", {"cart", "max_trajectories"});
    e.analysis_cart = parse_cart(analysis["cart"], where + ".analysis.cart");
    e.max_trajectories = get_or<std::size_t>(analysis, "max_trajectories", e.max_trajectories, where);
  }
  if (auto errors = validate_problem(p); !errors.empty())
    throw ConfigError(where + ": " + errors.front());
  return e;
}

}  // namespace

ExperimentRegistry ExperimentRegistry::parse(const std::string& text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("cannot parse experiment registry: ") + e.what());
  }
  const YAML::Node list = root["experiments"];
  if (!list || !list.IsSequence()) throw ConfigError("registry must contain an 'experiments' list");
  ExperimentRegistry registry;
  for (std::size_t i = 0; i < list.size(); ++i) registry.add(parse_experiment(list[i], base_dir, i));
  return registry;
}

ExperimentRegistry ExperimentRegistry::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read experiment registry " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.parent_path());
}

void ExperimentRegistry::add(Experiment experiment) {
  for (const auto& e : experiments_)
    if (e.name == experiment.name)
      throw ConfigError(fmt::format("duplicate experiment name '{}'", experiment.name));
  experiments_.push_back(std::move(experiment));
}

const Experiment& ExperimentRegistry::find(const std::string& key) const {
  for (const auto& e : experiments_)
    if (e.name == key) return e;
  if (!key.empty() && key.find_first_not_of("0123456789") == std::string::npos && key.size() < 10) {
    const std::size_t position = std::stoul(key);
    if (position >= 1 && position <= experiments_.size()) return experiments_[position - 1];
  }
  throw ConfigError(fmt::format("unknown experiment '{}'. Available experiments:\n{}", key, listing()));
}

std::string ExperimentRegistry::listing() const {
  std::string out;
  for (std::size_t i = 0; i < experiments_.size(); ++i) {
    const auto& e = experiments_[i];
    out += fmt::format("  {:>2}  {:<24} {:<8} {}\n", i + 1, e.name,
                       e.algorithm == Algorithm::Nsga2 ? "NSGA2" : "NSGA2DT", e.problem.problem_name);
  }
  return out;
}

std::chrono::seconds parse_duration(const std::string& text) {
  static const std::regex pattern(R"(^(\d+):([0-5]\d):([0-5]\d)$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern))
    throw ConfigError(fmt::format("invalid duration '{}', expected HH:MM:SS", text));
  return std::chrono::hours(std::stol(m[1])) + std::chrono::minutes(std::stol(m[2])) +
         std::chrono::seconds(std::stol(m[3]));
}

fs::path make_results_dir(const fs::path& root, const std::string& experiment,
                          const std::optional<std::string>& run_id) {
  const fs::path parent = root / experiment;
  fs::path dir;
  if (run_id) {
    if (run_id->empty() || run_id->find('/') != std::string::npos || *run_id == "." || *run_id == "..")
      throw ConfigError(fmt::format("invalid run id '{}'", *run_id));
    dir = parent / *run_id;
  } else {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
    dir = parent / stamp;
    for (int suffix = 1; fs::exists(dir); ++suffix) dir = parent / fmt::format("{}-{}", stamp, suffix);
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError(fmt::format("cannot create results directory {}: {}", dir.string(),
                              ec ? ec.message() : "not a directory"));
  // Probe writability; create_directories succeeds on an existing read-only dir.
  const fs::path probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("results directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
  return dir;
}

std::size_t write_analysis(const Experiment& experiment, const OptimizerResult& result,
                           const fs::path& dir, std::ostream& log) {
  const AdasProblem& problem = experiment.problem;
  const ScenarioSpec& spec = problem.spec;
  export_results_csv(result.archive, spec, problem.fitness.objective_names, dir);

  std::vector<Region> regions;
  if (!result.archive.empty()) {
    const DecisionTree tree = fit_cart(result.archive, spec.bounds(), experiment.analysis_cart);
    regions = extract_critical_regions(tree);
    export_tree(tree, regions, spec, dir);
  } else {
    write_text_file(dir / "tree.json", "{}\n");
    write_text_file(dir / "regions.txt", "");
  }
  if (!result.archive.empty()) {
    const PlotExport plots = export_design_space_plots(result.archive, regions, spec, dir);
    for (const auto& w : plots.warnings) log << "warning: " << w << "\n";
  }

  if (!result.dt_iterations.empty()) {
    nlohmann::json iterations = nlohmann::json::array();
    for (const auto& it : result.dt_iterations) {
      nlohmann::json regions_json = nlohmann::json::array();
      for (const auto& r : it.critical_regions)
        regions_json.push_back({{"condition", format_condition(r, spec)},
                                {"support", r.support},
                                {"purity", r.purity}});
      iterations.push_back({{"iteration", it.iteration},
                            {"evaluations", it.evaluations},
                            {"searched_regions", it.searched_regions.size()},
                            {"critical_regions", std::move(regions_json)}});
    }
    write_text_file(dir / "dt_iterations.json", iterations.dump(2) + "\n");
  }

  // Trajectories are re-simulated; backends are deterministic per (input, seed).
  std::vector<TrajectoryCase> cases;
  for (std::size_t idx : result.critical_set) {
    if (cases.size() >= experiment.max_trajectories) break;
    const EvaluationRecord& r = result.archive[idx];
    cases.push_back({r.index, problem.simulator->simulate(spec, r.input, r.seed)});
  }
  export_trajectories(cases, dir);
  return regions.size();
}

RunSummary run_experiment(const Experiment& experiment, const fs::path& dir, std::ostream& log) {
  OptimizerResult result;
  try {
    if (experiment.algorithm == Algorithm::Nsga2) {
      result = nsga2_run(experiment.problem, experiment.search);
    } else {
      result = nsgaii_dt_run(experiment.problem, experiment.search, experiment.dt.value_or(DtConfig{}));
    }
  } catch (const SearchAborted& e) {
    export_results_csv(e.archive(), experiment.problem.spec, experiment.problem.fitness.objective_names,
                       dir);
    throw;
  }
  RunSummary summary;
  summary.results_dir = dir;
  summary.evaluations = result.archive.size();
  summary.critical = result.critical_set.size();
  summary.iterations = result.iterations_run;
  summary.wall_time = result.wall_time;
  summary.regions = write_analysis(experiment, result, dir, log);
  return summary;
}

}  // namespace sbt
