#pragma once

// Binary classification tree (CART, Gini impurity) over search variables,
// and the axis-aligned regions its leaves describe.
//
// Features are scaled to the unit cube before fitting. Samples with
// feature < threshold go left, the rest go right; thresholds sit midway
// between adjacent distinct feature values.

#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "sbt/record.hpp"
#include "sbt/scenario.hpp"

namespace sbt {

struct CartParams {
  std::size_t max_depth = 6;
  std::size_t min_samples_split = 10;
  double min_impurity_decrease = 0.01;
};

struct TreeNode {
  bool is_leaf = true;
  std::size_t feature = 0;
  double threshold_unit = 0.0;
  double threshold_raw = 0.0;
  int left = -1;
  int right = -1;
  std::size_t count_total = 0;
  std::size_t count_critical = 0;
  std::size_t depth = 0;

  /// Majority label; ties are non-critical.
  bool label() const { return 2 * count_critical > count_total; }
  double critical_fraction() const {
    return count_total == 0 ? 0.0
                            : static_cast<double>(count_critical) / static_cast<double>(count_total);
  }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  Box bounds;

  /// Index of the leaf reached by a raw-unit point.
  std::size_t leaf_for(std::span<const double> raw) const;
  bool predict(std::span<const double> raw) const { return nodes[leaf_for(raw)].label(); }
  std::size_t depth() const;
  std::vector<std::size_t> leaves() const;
};

/// `unit_features[i]` lies in the unit cube of `bounds`.
DecisionTree fit_cart(const std::vector<std::vector<double>>& unit_features,
                      const std::vector<bool>& labels, const Box& bounds,
                      const CartParams& params = {});

/// Fits on record inputs (scaled by `bounds`) labelled by record.critical.
DecisionTree fit_cart(const std::vector<EvaluationRecord>& records, const Box& bounds,
                      const CartParams& params = {});

/// A leaf's cell. Lower bounds are inclusive; an upper bound produced by a
/// split is strict, the global upper bound is inclusive.
struct Region {
  Box box;
  std::vector<bool> upper_strict;
  std::size_t leaf = 0;
  std::size_t support = 0;
  double purity = 0.0;

  bool contains(std::span<const double> raw) const;
};

/// Cell of one leaf, with support and purity taken from the leaf counts.
Region leaf_region(const DecisionTree& tree, std::size_t leaf);

/// One region per leaf labelled critical, in node order.
std::vector<Region> extract_critical_regions(const DecisionTree& tree);

/// Recounts support and purity of `region` from raw records.
void rescore_region(Region& region, const std::vector<EvaluationRecord>& records);

/// Conjunction of the non-trivial bounds in spec order, e.g.
/// "EgoSpeed < 8.33 m/s ∧ PedSpeed ≥ 1.20 m/s"; "true" when unconstrained.
std::string format_condition(const Region& region, const ScenarioSpec& spec);

/// Nested node objects, children under "left"/"right".
nlohmann::json tree_to_json(const DecisionTree& tree, const ScenarioSpec& spec);

}  // namespace sbt
