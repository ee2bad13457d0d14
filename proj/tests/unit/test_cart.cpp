#include <doctest.h>

#include "sbt/cart.hpp"
#include "sbt/problem.hpp"

using namespace sbt;

namespace {

EvaluationRecord rec(std::vector<double> x, bool critical) {
  EvaluationRecord r;
  r.input.values = std::move(x);
  r.critical = critical;
  return r;
}

DecisionTree ego_speed_tree() {
  DecisionTree tree;
  tree.bounds = pedestrian_crossing_spec().bounds();
  TreeNode root;
  root.is_leaf = false;
  root.feature = 1;
  root.threshold_raw = 8.33;
  root.threshold_unit = (8.33 - 1.0) / 21.0;
  root.left = 1;
  root.right = 2;
  root.count_total = 20;
  root.count_critical = 10;
  TreeNode left;
  left.depth = 1;
  left.count_total = 10;
  left.count_critical = 10;
  TreeNode right = left;
  right.count_critical = 0;
  tree.nodes = {root, left, right};
  return tree;
}

double gini(std::size_t c, std::size_t n) {
  if (n == 0) return 0.0;
  const double p = double(c) / double(n);
  return 1.0 - p * p - (1 - p) * (1 - p);
}

}  // namespace

TEST_CASE("1D split lands at the midpoint") {
  const Box box{{6, 10}};
  std::vector<EvaluationRecord> data;
  for (double v : {6, 7, 8}) data.push_back(rec({v}, false));
  for (double v : {9, 10}) data.push_back(rec({v}, true));
  CartParams params;
  params.min_samples_split = 2;
  const auto tree = fit_cart(data, box, params);
  REQUIRE_FALSE(tree.nodes[0].is_leaf);
  CHECK(tree.nodes[0].threshold_raw == doctest::Approx(8.5).epsilon(1e-12));
  CHECK(tree.depth() == 1);
  for (auto leaf : tree.leaves()) {
    const auto& n = tree.nodes[leaf];
    CHECK((n.count_critical == 0 || n.count_critical == n.count_total));
  }

  // Exhaustive oracle: best midpoint by weighted child impurity.
  double best_t = 0, best_imp = 1e9;
  const std::vector<double> xs{6, 7, 8, 9, 10};
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double t = (xs[k] + xs[k + 1]) / 2;
    std::size_t nl = 0, cl = 0, nr = 0, cr = 0;
    for (const auto& r : data) {
      if (r.input.values[0] < t) {
        ++nl;
        cl += r.critical;
      } else {
        ++nr;
        cr += r.critical;
      }
    }
    const double imp = (nl * gini(cl, nl) + nr * gini(cr, nr)) / 5.0;
    if (imp < best_imp) best_imp = imp, best_t = t;
  }
  CHECK(tree.nodes[0].threshold_raw == doctest::Approx(best_t));
  CHECK(tree.predict(std::vector<double>{8.6}));
  CHECK_FALSE(tree.predict(std::vector<double>{8.4}));
}

TEST_CASE("all critical gives a single critical leaf") {
  const Box box{{0, 1}, {0, 1}};
  std::vector<EvaluationRecord> data;
  for (int i = 0; i < 20; ++i) data.push_back(rec({i / 20.0, 0.5}, true));
  const auto tree = fit_cart(data, box);
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].label());
  const auto regions = extract_critical_regions(tree);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].box[0].lower == 0.0);
  CHECK(regions[0].box[0].upper == 1.0);
  CHECK(regions[0].box[1].lower == 0.0);
  CHECK(regions[0].box[1].upper == 1.0);
}

TEST_CASE("XOR is separated with two levels") {
  const Box box{{0, 1}, {0, 1}};
  std::vector<EvaluationRecord> data{rec({0.25, 0.25}, false), rec({0.75, 0.75}, false),
                                     rec({0.25, 0.75}, true), rec({0.75, 0.25}, true)};
  CartParams params;
  params.max_depth = 2;
  params.min_samples_split = 2;
  params.min_impurity_decrease = 0.0;
  const auto tree = fit_cart(data, box, params);
  CHECK(tree.depth() == 2);
  for (const auto& r : data) CHECK(tree.predict(r.input.values) == r.critical);
  CHECK(tree.leaves().size() == 4);
}

TEST_CASE("ties between equal classes are non-critical") {
  TreeNode n;
  n.count_total = 4;
  n.count_critical = 2;
  CHECK_FALSE(n.label());
}

TEST_CASE("single EgoSpeed split region and condition") {
  const auto spec = pedestrian_crossing_spec();
  const auto regions = extract_critical_regions(ego_speed_tree());
  REQUIRE(regions.size() == 1);
  const auto& r = regions[0];
  CHECK(r.box[1].lower == 1.0);
  CHECK(r.box[1].upper == 8.33);
  CHECK(r.upper_strict[1]);
  CHECK(r.box[0].lower == 0.5);
  CHECK(r.box[0].upper == 3.0);
  CHECK(r.box[2].lower == 0.0);
  CHECK(r.box[2].upper == 60.0);
  CHECK(format_condition(r, spec) == "EgoSpeed < 8.33 m/s");
  CHECK(r.contains(std::vector<double>{1.0, 8.32, 30.0}));
  CHECK_FALSE(r.contains(std::vector<double>{1.0, 8.33, 30.0}));
}

TEST_CASE("condition formatting") {
  const auto spec = pedestrian_crossing_spec();
  Region full;
  full.box = spec.bounds();
  full.upper_strict.assign(3, false);
  CHECK(format_condition(full, spec) == "true");
  Region two = full;
  two.box[0].lower = 1.25;
  two.box[2].upper = 40.0;
  two.upper_strict[2] = true;
  CHECK(format_condition(two, spec) == "PedSpeed ≥ 1.25 m/s ∧ PedDist < 40.00 m");
}

TEST_CASE("critical leaves under different branches are disjoint") {
  const Box box{{0, 1}, {0, 1}};
  std::vector<EvaluationRecord> data{rec({0.25, 0.25}, false), rec({0.75, 0.75}, false),
                                     rec({0.25, 0.75}, true), rec({0.75, 0.25}, true)};
  CartParams params{2, 2, 0.0};
  const auto regions = extract_critical_regions(fit_cart(data, box, params));
  REQUIRE(regions.size() == 2);
  bool overlap = true;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = regions[0].box[i];
    const auto& b = regions[1].box[i];
    const double lo = std::max(a.lower, b.lower), hi = std::min(a.upper, b.upper);
    // touching at a threshold is not overlap: one side is strict
    if (hi <= lo) overlap = false;
  }
  CHECK_FALSE(overlap);
  for (const auto& r : regions) CHECK(is_sub_box(r.box, box));
}

TEST_CASE("leaves partition the box") {
  const auto spec = pedestrian_crossing_spec();
  const Box box = spec.bounds();
  std::vector<EvaluationRecord> data;
  Rng rng(12);
  for (const auto& x : sample_uniform(box, 500, rng))
    data.push_back(rec(x.values, x.values[1] > 12 && x.values[2] < 35));
  const auto tree = fit_cart(data, box);
  std::vector<Region> all;
  for (auto leaf : tree.leaves()) all.push_back(leaf_region(tree, leaf));
  for (const auto& x : sample_uniform(box, 10000, rng)) {
    std::size_t hits = 0;
    bool label = false;
    for (const auto& r : all) {
      if (r.contains(x.values)) {
        ++hits;
        label = tree.nodes[r.leaf].label();
      }
    }
    CHECK(hits == 1);
    CHECK(label == tree.predict(x.values));
  }
}

TEST_CASE("rescoring a region counts contained records") {
  const auto regions = extract_critical_regions(ego_speed_tree());
  auto r = regions[0];
  std::vector<EvaluationRecord> data{rec({1, 5, 10}, true), rec({1, 6, 10}, false),
                                     rec({1, 7, 10}, true), rec({1, 7.5, 10}, true),
                                     rec({1, 20, 10}, true)};
  rescore_region(r, data);
  CHECK(r.support == 4);
  CHECK(r.purity == 0.75);
}

TEST_CASE("min_impurity_decrease suppresses weak splits") {
  const Box box{{0, 1}};
  std::vector<EvaluationRecord> data;
  for (int i = 0; i < 100; ++i) data.push_back(rec({i / 100.0}, i == 99));
  CartParams params;
  params.min_impurity_decrease = 0.05;
  CHECK(fit_cart(data, box, params).nodes.size() == 1);
}

TEST_CASE("tree JSON names features") {
  const auto j = tree_to_json(ego_speed_tree(), pedestrian_crossing_spec());
  CHECK(j.dump().find("EgoSpeed") != std::string::npos);
}
