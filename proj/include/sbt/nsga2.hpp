#pragma once

// NSGA-II building blocks. All objective vectors are in minimisation form.

#include <limits>
#include <utility>
#include <vector>

#include "sbt/random.hpp"
#include "sbt/scenario.hpp"

namespace sbt {

inline constexpr double kInfiniteCrowding = std::numeric_limits<double>::infinity();

struct Individual {
  TestInput input;
  std::vector<double> objectives;
  bool critical = false;
  std::size_t rank = 0;
  double crowding = 0.0;
  std::size_t record = 0;  // archive index
};

using Fronts = std::vector<std::vector<std::size_t>>;

/// Fronts of indices into `objectives`, each front in ascending index order.
Fronts fast_non_dominated_sort(const std::vector<std::vector<double>>& objectives);

/// Crowding distance of each member of one front.
std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front);

/// Writes rank and crowding into every individual.
void assign_rank_and_crowding(std::vector<Individual>& population);

/// Binary tournament on (rank asc, crowding desc), random on full ties.
/// Returns an index into `population`.
std::size_t crowded_tournament_select(const std::vector<Individual>& population, Rng& rng);

/// Simulated binary crossover; children are clamped to `box`.
std::pair<TestInput, TestInput> sbx_crossover(const TestInput& p1, const TestInput& p2, double eta,
                                              double probability, const Box& box, Rng& rng);

/// Bounded polynomial mutation with per-variable `probability`.
TestInput polynomial_mutation(const TestInput& x, double eta, double probability, const Box& box,
                              Rng& rng);

/// Keeps `n` of `combined` by rank, then by crowding within the last front
/// admitted. Returned members carry rank and crowding of the survivors.
std::vector<Individual> environmental_selection(std::vector<Individual> combined, std::size_t n);

}  // namespace sbt
