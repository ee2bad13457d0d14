#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbt/cart.hpp"
#include "sbt/record.hpp"
#include "sbt/scenario.hpp"
#include "sbt/simulation.hpp"

namespace sbt {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `content` verbatim (binary mode, so LF stays LF). Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// "index,<variables>,<objectives>,critical" followed by one row per record.
std::string results_csv(const std::vector<EvaluationRecord>& records, const ScenarioSpec& spec,
                        const std::vector<std::string>& objective_names);

/// Writes all_evaluations.csv and critical.csv into `outdir`.
void export_results_csv(const std::vector<EvaluationRecord>& records, const ScenarioSpec& spec,
                        const std::vector<std::string>& objective_names,
                        const std::filesystem::path& outdir);

struct PlotExport {
  std::vector<std::filesystem::path> files;  // .svg files, one per variable pair
  std::vector<std::string> warnings;
};

/// One SVG scatter (plus CSV twin) per unordered variable pair, with the
/// regions drawn as rectangles.
std::string design_space_svg(const std::vector<EvaluationRecord>& records,
                             const std::vector<Region>& regions, const ScenarioSpec& spec,
                             std::size_t var_x, std::size_t var_y);
PlotExport export_design_space_plots(const std::vector<EvaluationRecord>& records,
                                     const std::vector<Region>& regions, const ScenarioSpec& spec,
                                     const std::filesystem::path& outdir);

/// tree.json and regions.txt.
void export_tree(const DecisionTree& tree, const std::vector<Region>& regions,
                 const ScenarioSpec& spec, const std::filesystem::path& outdir);
std::string regions_text(const std::vector<Region>& regions, const ScenarioSpec& spec);

struct TrajectoryCase {
  std::size_t index = 0;  // archive index
  SimulationOutput output;
};

/// Overview of every case's ego and pedestrian paths; collisions are marked
/// with an element whose id is "collision-<index>".
std::string trajectory_overview_svg(const std::vector<TrajectoryCase>& cases);

/// trajectories/<index>.json (bridge response schema) and
/// trajectories/overview.svg under `outdir`.
void export_trajectories(const std::vector<TrajectoryCase>& cases,
                         const std::filesystem::path& outdir);

}  // namespace sbt
