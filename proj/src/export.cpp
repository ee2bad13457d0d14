#include "sbt/export.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "sbt/bridge.hpp"

namespace sbt {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string results_csv(const std::vector<EvaluationRecord>& records, const ScenarioSpec& spec,
                        const std::vector<std::string>& objective_names) {
  std::string out = "index";
  for (const auto& p : spec.parameters) out += "," + p.name;
  for (const auto& name : objective_names) out += "," + name;
  out += ",critical\n";
  for (const auto& r : records) {
    if (r.input.values.size() != spec.parameters.size() ||
        r.objectives.size() != objective_names.size())
      throw std::invalid_argument(fmt::format("record {} does not match the CSV layout", r.index));
    out += std::to_string(r.index);
    for (double v : r.input.values) out += fmt::format(",{:.6f}", v);
    for (double v : r.objectives) out += fmt::format(",{:.6f}", v);
    out += r.critical ? ",true\n" : ",false\n";
  }
  return out;
}

void export_results_csv(const std::vector<EvaluationRecord>& records, const ScenarioSpec& spec,
                        const std::vector<std::string>& objective_names, const fs::path& outdir) {
  std::vector<EvaluationRecord> critical;
  std::copy_if(records.begin(), records.end(), std::back_inserter(critical),
               [](const EvaluationRecord& r) { return r.critical; });
  write_text_file(outdir / "all_evaluations.csv", results_csv(records, spec, objective_names));
  write_text_file(outdir / "critical.csv", results_csv(critical, spec, objective_names));
}

namespace {

constexpr double kWidth = 520.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

struct Axis {
  double lo;
  double hi;
  double to_px_x(double v) const { return kLeft + (v - lo) / (hi - lo) * kPlotW; }
  double to_px_y(double v) const { return kTop + kPlotH - (v - lo) / (hi - lo) * kPlotH; }
};

std::string svg_header(const std::string& title) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0:.0f}\" height=\"{1:.0f}\" fill=\"white\"/>\n"
      "<text x=\"{2:.2f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n",
      kWidth, kHeight, kWidth / 2.0, title);
}

std::string axes_svg(const std::string& x_label, const Axis& x, const std::string& y_label,
                     const Axis& y) {
  std::string s = fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      kLeft, kTop, kPlotW, kPlotH);
  for (int k = 0; k <= 4; ++k) {
    const double vx = x.lo + (x.hi - x.lo) * k / 4.0;
    const double vy = y.lo + (y.hi - y.lo) * k / 4.0;
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.2f}</text>\n",
                     x.to_px_x(vx), kTop + kPlotH + 18.0, vx);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.2f}</text>\n",
                     kLeft - 6.0, y.to_px_y(vy) + 4.0, vy);
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                   kLeft + kPlotW / 2.0, kHeight - 15.0, x_label);
  s += fmt::format(
      "<text x=\"18\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">{}"
      "</text>\n",
      kTop + kPlotH / 2.0, kTop + kPlotH / 2.0, y_label);
  return s;
}

std::string axis_label(const ScenarioParameter& p) {
  return p.unit.empty() ? p.name : fmt::format("{} [{}]", p.name, p.unit);
}

std::string xml_escape(const std::string& in) {
  std::string out;
  for (char c : in) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string design_space_svg(const std::vector<EvaluationRecord>& records,
                             const std::vector<Region>& regions, const ScenarioSpec& spec,
                             std::size_t vx, std::size_t vy) {
  const auto& px = spec.parameters.at(vx);
  const auto& py = spec.parameters.at(vy);
  const Axis ax{px.lower, px.upper};
  const Axis ay{py.lower, py.upper};
  std::string s = svg_header(xml_escape(fmt::format("Design space: {} vs {}", py.name, px.name)));
  s += "<g id=\"regions\" fill=\"#9467bd\" fill-opacity=\"0.25\" stroke=\"#9467bd\">\n";
  for (const auto& region : regions) {
    const Interval& ix = region.box[vx];
    const Interval& iy = region.box[vy];
    const double x0 = ax.to_px_x(ix.lower);
    const double x1 = ax.to_px_x(ix.upper);
    const double y0 = ay.to_px_y(iy.upper);
    const double y1 = ay.to_px_y(iy.lower);
    s += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"><title>{}</title>"
        "</rect>\n",
        x0, y0, x1 - x0, y1 - y0, xml_escape(format_condition(region, spec)));
  }
  s += "</g>\n";
  s += "<g id=\"non-critical\" fill=\"none\" stroke=\"#1f77b4\">\n";
  for (const auto& r : records) {
    if (r.critical) continue;
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\"/>\n",
                     ax.to_px_x(r.input.values[vx]), ay.to_px_y(r.input.values[vy]));
  }
  s += "</g>\n<g id=\"critical\" fill=\"#d62728\" stroke=\"none\">\n";
  for (const auto& r : records) {
    if (!r.critical) continue;
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\"/>\n",
                     ax.to_px_x(r.input.values[vx]), ay.to_px_y(r.input.values[vy]));
  }
  s += "</g>\n";
  s += axes_svg(xml_escape(axis_label(px)), ax, xml_escape(axis_label(py)), ay);
  s += fmt::format(
      "<g id=\"legend\"><circle cx=\"{0:.2f}\" cy=\"{1:.2f}\" r=\"3\" fill=\"none\" "
      "stroke=\"#1f77b4\"/><text x=\"{2:.2f}\" y=\"{3:.2f}\">non-critical</text>"
      "<circle cx=\"{4:.2f}\" cy=\"{1:.2f}\" r=\"3.5\" fill=\"#d62728\"/>"
      "<text x=\"{5:.2f}\" y=\"{3:.2f}\">critical</text></g>\n",
      kLeft + 10.0, kTop - 8.0, kLeft + 18.0, kTop - 4.0, kLeft + 110.0, kLeft + 118.0);
  s += "</svg>\n";
  return s;
}

PlotExport export_design_space_plots(const std::vector<EvaluationRecord>& records,
                                     const std::vector<Region>& regions, const ScenarioSpec& spec,
                                     const fs::path& outdir) {
  PlotExport result;
  const std::size_t d = spec.parameters.size();
  if (d < 2) {
    result.warnings.push_back(
        fmt::format("design space plots need at least two variables, spec has {}", d));
    return result;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const std::string stem = fmt::format("design_space_{}_{}", spec.parameters[i].name,
                                           spec.parameters[j].name);
      const fs::path svg = outdir / (stem + ".svg");
      write_text_file(svg, design_space_svg(records, regions, spec, i, j));
      std::string csv = fmt::format("index,{},{},critical\n", spec.parameters[i].name,
                                    spec.parameters[j].name);
      for (const auto& r : records)
        csv += fmt::format("{},{:.6f},{:.6f},{}\n", r.index, r.input.values[i], r.input.values[j],
                           r.critical ? "true" : "false");
      write_text_file(outdir / (stem + ".csv"), csv);
      result.files.push_back(svg);
    }
  }
  return result;
}

std::string regions_text(const std::vector<Region>& regions, const ScenarioSpec& spec) {
  std::string out;
  for (const auto& r : regions)
    out += fmt::format("{} | support={} | purity={:.6f}\n", format_condition(r, spec), r.support,
                       r.purity);
  return out;
}

void export_tree(const DecisionTree& tree, const std::vector<Region>& regions,
                 const ScenarioSpec& spec, const fs::path& outdir) {
  write_text_file(outdir / "tree.json", tree_to_json(tree, spec).dump(2) + "\n");
  write_text_file(outdir / "regions.txt", regions_text(regions, spec));
}

std::string trajectory_overview_svg(const std::vector<TrajectoryCase>& cases) {
  double min_x = std::numeric_limits<double>::infinity();
  double max_x = -min_x;
  double min_y = min_x;
  double max_y = -min_x;
  for (const auto& c : cases) {
    for (const auto& [name, traj] : c.output.actors) {
      for (const auto& s : traj) {
        min_x = std::min(min_x, s.x);
        max_x = std::max(max_x, s.x);
        min_y = std::min(min_y, s.y);
        max_y = std::max(max_y, s.y);
      }
    }
  }
  if (!std::isfinite(min_x)) min_x = min_y = 0.0, max_x = max_y = 1.0;
  if (max_x - min_x < 1.0) max_x = min_x + 1.0;
  if (max_y - min_y < 1.0) max_y = min_y + 1.0;
  const Axis ax{min_x - 1.0, max_x + 1.0};
  const Axis ay{min_y - 1.0, max_y + 1.0};

  std::string s = svg_header("Actor paths");
  for (const auto& c : cases) {
    s += fmt::format("<g id=\"case-{}\" fill=\"none\">\n", c.index);
    for (const auto& [name, traj] : c.output.actors) {
      const char* colour = name == "ego" ? "#1f77b4" : (name == "pedestrian" ? "#ff7f0e" : "#7f7f7f");
      s += fmt::format("<polyline data-actor=\"{}\" stroke=\"{}\" points=\"", xml_escape(name), colour);
      // Thin long trajectories to roughly 200 vertices.
      const std::size_t stride = std::max<std::size_t>(1, traj.size() / 200);
      for (std::size_t k = 0; k < traj.size(); k += stride)
        s += fmt::format("{:.2f},{:.2f} ", ax.to_px_x(traj[k].x), ay.to_px_y(traj[k].y));
      if (!traj.empty())
        s += fmt::format("{:.2f},{:.2f}", ax.to_px_x(traj.back().x), ay.to_px_y(traj.back().y));
      s += "\"/>\n";
    }
    if (c.output.collision && c.output.collision_time && c.output.actors.count("ego")) {
      const auto& ego = c.output.actors.at("ego");
      const auto k = static_cast<std::size_t>(std::llround(*c.output.collision_time / c.output.dt));
      const ActorState& at = ego[std::min(k, ego.size() - 1)];
      s += fmt::format(
          "<circle id=\"collision-{}\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"#d62728\"/>\n",
          c.index, ax.to_px_x(at.x), ay.to_px_y(at.y));
    }
    s += "</g>\n";
  }
  s += axes_svg("x [m]", ax, "y [m]", ay);
  s += "</svg>\n";
  return s;
}

void export_trajectories(const std::vector<TrajectoryCase>& cases, const fs::path& outdir) {
  const fs::path dir = outdir / "trajectories";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  for (const auto& c : cases) {
    write_text_file(dir / fmt::format("{}.json", c.index),
                    bridge::encode_output(c.output, static_cast<std::int64_t>(c.index)).dump() + "\n");
  }
  write_text_file(dir / "overview.svg", trajectory_overview_svg(cases));
}

}  // namespace sbt
