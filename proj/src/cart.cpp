#include "sbt/cart.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace sbt {

namespace {

/// n * gini for a node holding `critical` of `n` samples.
double weighted_gini(double n, double critical) {
  if (n == 0.0) return 0.0;
  const double other = n - critical;
  return n - (critical * critical + other * other) / n;
}

struct Split {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double decrease = 0.0;
};

class CartBuilder {
 public:
  CartBuilder(const std::vector<std::vector<double>>& x, const std::vector<bool>& y,
              const CartParams& params)
      : x_(x), y_(y), params_(params), total_(static_cast<double>(x.size())) {}

  int build(std::vector<std::size_t> samples, std::size_t depth, std::vector<TreeNode>& nodes) {
    TreeNode node;
    node.depth = depth;
    node.count_total = samples.size();
    for (std::size_t i : samples) node.count_critical += y_[i] ? 1 : 0;
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(node);

    const bool pure = node.count_critical == 0 || node.count_critical == node.count_total;
    if (pure || depth >= params_.max_depth || samples.size() < params_.min_samples_split ||
        samples.size() < 2)
      return id;

    const Split split = best_split(samples, node.count_critical);
    if (!split.found || split.decrease < params_.min_impurity_decrease) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : samples)
      (x_[i][split.feature] < split.threshold ? left : right).push_back(i);
    samples.clear();
    samples.shrink_to_fit();

    const int l = build(std::move(left), depth + 1, nodes);
    const int r = build(std::move(right), depth + 1, nodes);
    TreeNode& self = nodes[static_cast<std::size_t>(id)];
    self.is_leaf = false;
    self.feature = split.feature;
    self.threshold_unit = split.threshold;
    self.left = l;
    self.right = r;
    return id;
  }

 private:
  Split best_split(const std::vector<std::size_t>& samples, std::size_t critical) const {
    const double n = static_cast<double>(samples.size());
    const double parent = weighted_gini(n, static_cast<double>(critical));
    Split best;
    std::vector<std::size_t> order = samples;
    const std::size_t features = x_[samples.front()].size();
    for (std::size_t f = 0; f < features; ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return x_[a][f] < x_[b][f]; });
      double left_n = 0.0;
      double left_c = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        left_n += 1.0;
        left_c += y_[order[k]] ? 1.0 : 0.0;
        const double a = x_[order[k]][f];
        const double b = x_[order[k + 1]][f];
        if (!(a < b)) continue;
        const double children =
            weighted_gini(left_n, left_c) +
            weighted_gini(n - left_n, static_cast<double>(critical) - left_c);
        // Weighted decrease relative to the whole training set.
        const double decrease = (parent - children) / total_;
        if (!best.found || decrease > best.decrease + 1e-12) {
          best = {true, f, 0.5 * (a + b), decrease};
        }
      }
    }
    return best;
  }

  const std::vector<std::vector<double>>& x_;
  const std::vector<bool>& y_;
  CartParams params_;
  double total_;
};

}  // namespace

DecisionTree fit_cart(const std::vector<std::vector<double>>& unit_features,
                      const std::vector<bool>& labels, const Box& bounds,
                      const CartParams& params) {
  if (unit_features.empty()) throw std::invalid_argument("fit_cart: no samples");
  if (unit_features.size() != labels.size())
    throw std::invalid_argument("fit_cart: feature/label count mismatch");
  DecisionTree tree;
  tree.bounds = bounds;
  std::vector<std::size_t> all(unit_features.size());
  std::iota(all.begin(), all.end(), 0);
  CartBuilder(unit_features, labels, params).build(std::move(all), 0, tree.nodes);
  for (auto& node : tree.nodes) {
    if (node.is_leaf) continue;
    const Interval& iv = bounds[node.feature];
    node.threshold_raw = iv.lower + node.threshold_unit * iv.width();
  }
  return tree;
}

DecisionTree fit_cart(const std::vector<EvaluationRecord>& records, const Box& bounds,
                      const CartParams& params) {
  std::vector<std::vector<double>> features;
  std::vector<bool> labels;
  features.reserve(records.size());
  labels.reserve(records.size());
  for (const auto& r : records) {
    features.push_back(scale_to_unit(bounds, r.input.values));
    labels.push_back(r.critical);
  }
  return fit_cart(features, labels, bounds, params);
}

std::size_t DecisionTree::leaf_for(std::span<const double> raw) const {
  std::size_t id = 0;
  while (!nodes[id].is_leaf) {
    const TreeNode& n = nodes[id];
    const Interval& iv = bounds[n.feature];
    const double unit = (raw[n.feature] - iv.lower) / iv.width();
    id = static_cast<std::size_t>(unit < n.threshold_unit ? n.left : n.right);
  }
  return id;
}

std::size_t DecisionTree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::vector<std::size_t> DecisionTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].is_leaf) out.push_back(i);
  return out;
}

bool Region::contains(std::span<const double> raw) const {
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (raw[i] < box[i].lower) return false;
    if (upper_strict[i] ? !(raw[i] < box[i].upper) : raw[i] > box[i].upper) return false;
  }
  return true;
}

Region leaf_region(const DecisionTree& tree, std::size_t leaf) {
  // Parent links are implicit; rebuild the root-to-leaf path.
  std::vector<int> parent(tree.nodes.size(), -1);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (n.is_leaf) continue;
    parent[static_cast<std::size_t>(n.left)] = static_cast<int>(i);
    parent[static_cast<std::size_t>(n.right)] = static_cast<int>(i);
  }
  Region region;
  region.box = tree.bounds;
  region.upper_strict.assign(tree.bounds.size(), false);
  for (int child = static_cast<int>(leaf), p = parent[leaf]; p >= 0;
       child = p, p = parent[static_cast<std::size_t>(p)]) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(p)];
    Interval& iv = region.box[n.feature];
    if (child == n.left) {
      if (n.threshold_raw < iv.upper || (n.threshold_raw == iv.upper && !region.upper_strict[n.feature])) {
        iv.upper = n.threshold_raw;
        region.upper_strict[n.feature] = true;
      }
    } else {
      iv.lower = std::max(iv.lower, n.threshold_raw);
    }
  }
  const TreeNode& l = tree.nodes[leaf];
  region.leaf = leaf;
  region.support = l.count_total;
  region.purity = l.critical_fraction();
  return region;
}

std::vector<Region> extract_critical_regions(const DecisionTree& tree) {
  std::vector<Region> out;
  for (std::size_t leaf : tree.leaves())
    if (tree.nodes[leaf].label()) out.push_back(leaf_region(tree, leaf));
  return out;
}

void rescore_region(Region& region, const std::vector<EvaluationRecord>& records) {
  std::size_t inside = 0;
  std::size_t critical = 0;
  for (const auto& r : records) {
    if (!region.contains(r.input.values)) continue;
    ++inside;
    critical += r.critical ? 1 : 0;
  }
  region.support = inside;
  region.purity =
      inside == 0 ? 0.0 : static_cast<double>(critical) / static_cast<double>(inside);
}

std::string format_condition(const Region& region, const ScenarioSpec& spec) {
  std::vector<std::string> terms;
  for (std::size_t i = 0; i < spec.parameters.size(); ++i) {
    const auto& p = spec.parameters[i];
    const std::string unit = p.unit.empty() ? "" : " " + p.unit;
    if (region.box[i].lower > p.lower)
      terms.push_back(fmt::format("{} ≥ {:.2f}{}", p.name, region.box[i].lower, unit));
    if (region.box[i].upper < p.upper) {
      terms.push_back(fmt::format("{} {} {:.2f}{}", p.name, region.upper_strict[i] ? "<" : "≤",
                                  region.box[i].upper, unit));
    }
  }
  if (terms.empty()) return "true";
  std::string out = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) out += " ∧ " + terms[i];
  return out;
}

namespace {

nlohmann::json node_to_json(const DecisionTree& tree, std::size_t id, const ScenarioSpec& spec) {
  const TreeNode& n = tree.nodes[id];
  nlohmann::json j = {{"count_total", n.count_total}, {"count_critical", n.count_critical}};
  if (n.is_leaf) {
    j["leaf"] = true;
    j["label"] = n.label() ? "critical" : "non-critical";
    return j;
  }
  j["leaf"] = false;
  j["feature_index"] = n.feature;
  j["feature"] = n.feature < spec.parameters.size() ? spec.parameters[n.feature].name : "";
  j["threshold"] = n.threshold_raw;
  j["threshold_unit"] = n.threshold_unit;
  j["left"] = node_to_json(tree, static_cast<std::size_t>(n.left), spec);
  j["right"] = node_to_json(tree, static_cast<std::size_t>(n.right), spec);
  return j;
}

}  // namespace

nlohmann::json tree_to_json(const DecisionTree& tree, const ScenarioSpec& spec) {
  if (tree.nodes.empty()) return nlohmann::json::object();
  return node_to_json(tree, 0, spec);
}

}  // namespace sbt
