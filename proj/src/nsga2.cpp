#include "sbt/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbt/kernels.hpp"

namespace sbt {

Fronts fast_non_dominated_sort(const std::vector<std::vector<double>>& objectives) {
  Fronts fronts;
  if (objectives.empty()) return fronts;
  auto table = kernels::dominance_table_serial(objectives);
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < objectives.size(); ++p)
    if (table.dominated_by_count[p] == 0) current.push_back(p);
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current)
      for (std::size_t q : table.dominates[p])
        if (--table.dominated_by_count[q] == 0) next.push_back(q);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front) {
  const std::size_t m = front.size();
  std::vector<double> distance(m, 0.0);
  if (m <= 2) {
    std::fill(distance.begin(), distance.end(), kInfiniteCrowding);
    return distance;
  }
  const std::size_t objectives = front.front().size();
  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < objectives; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
    const double lo = front[order.front()][k];
    const double hi = front[order.back()][k];
    distance[order.front()] = kInfiniteCrowding;
    distance[order.back()] = kInfiniteCrowding;
    if (hi == lo) continue;
    for (std::size_t i = 1; i + 1 < m; ++i) {
      if (std::isinf(distance[order[i]])) continue;
      distance[order[i]] += (front[order[i + 1]][k] - front[order[i - 1]][k]) / (hi - lo);
    }
  }
  return distance;
}

void assign_rank_and_crowding(std::vector<Individual>& population) {
  std::vector<std::vector<double>> objectives;
  objectives.reserve(population.size());
  for (const auto& ind : population) objectives.push_back(ind.objectives);
  const Fronts fronts = fast_non_dominated_sort(objectives);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    std::vector<std::vector<double>> front_objectives;
    for (std::size_t i : fronts[r]) front_objectives.push_back(objectives[i]);
    const auto crowding = crowding_distance(front_objectives);
    for (std::size_t j = 0; j < fronts[r].size(); ++j) {
      population[fronts[r][j]].rank = r;
      population[fronts[r][j]].crowding = crowding[j];
    }
  }
}

std::size_t crowded_tournament_select(const std::vector<Individual>& population, Rng& rng) {
  const std::size_t n = population.size();
  if (n == 1) return 0;
  const std::size_t a = rng.index(n);
  std::size_t b = rng.index(n - 1);
  if (b >= a) ++b;
  const Individual& x = population[a];
  const Individual& y = population[b];
  if (x.rank != y.rank) return x.rank < y.rank ? a : b;
  if (x.crowding != y.crowding) return x.crowding > y.crowding ? a : b;
  return rng.coin() ? a : b;
}

std::pair<TestInput, TestInput> sbx_crossover(const TestInput& p1, const TestInput& p2, double eta,
                                              double probability, const Box& box, Rng& rng) {
  TestInput c1 = p1;
  TestInput c2 = p2;
  if (rng.uniform() >= probability) return {c1, c2};
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (rng.uniform() >= 0.5) continue;
    const double x1 = p1.values[i];
    const double x2 = p2.values[i];
    if (std::abs(x1 - x2) <= 1e-14) continue;
    const double u = rng.uniform();
    const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                 : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
    c1.values[i] = box[i].clamp(0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2));
    c2.values[i] = box[i].clamp(0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2));
  }
  return {c1, c2};
}

TestInput polynomial_mutation(const TestInput& x, double eta, double probability, const Box& box,
                              Rng& rng) {
  TestInput out = x;
  const double power = 1.0 / (eta + 1.0);
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (rng.uniform() >= probability) continue;
    const double lo = box[i].lower;
    const double width = box[i].width();
    const double v = x.values[i];
    const double delta1 = (v - lo) / width;
    const double delta2 = (box[i].upper - v) / width;
    const double r = rng.uniform();
    double deltaq;
    if (r < 0.5) {
      const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - delta1, eta + 1.0);
      deltaq = std::pow(val, power) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - delta2, eta + 1.0);
      deltaq = 1.0 - std::pow(val, power);
    }
    out.values[i] = box[i].clamp(v + deltaq * width);
  }
  return out;
}

std::vector<Individual> environmental_selection(std::vector<Individual> combined, std::size_t n) {
  assign_rank_and_crowding(combined);
  if (combined.size() <= n) return combined;
  std::vector<std::size_t> order(combined.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (combined[a].rank != combined[b].rank) return combined[a].rank < combined[b].rank;
    return combined[a].crowding > combined[b].crowding;
  });
  order.resize(n);
  std::sort(order.begin(), order.end());
  std::vector<Individual> survivors;
  survivors.reserve(n);
  for (std::size_t i : order) survivors.push_back(std::move(combined[i]));
  return survivors;
}

}  // namespace sbt
