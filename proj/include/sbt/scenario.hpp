#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbt/random.hpp"

namespace sbt {

/// One searched scenario variable with closed bounds in SI units.
struct ScenarioParameter {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  std::string unit;
};

/// Closed interval [lower, upper].
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  double clamp(double v) const { return v < lower ? lower : (v > upper ? upper : v); }
  bool contains(double v) const { return v >= lower && v <= upper; }
};

/// Axis-aligned box, one interval per search variable in declaration order.
using Box = std::vector<Interval>;

/// A concrete scenario instance: one value per search variable.
struct TestInput {
  std::vector<double> values;

  bool operator==(const TestInput&) const = default;
};

/// Parameterized scenario. Parameter order defines the index order of every
/// input vector, CSV column, and tree feature in the system.
struct ScenarioSpec {
  std::string scenario_path;
  std::vector<ScenarioParameter> parameters;
  std::map<std::string, double> fixed_settings;

  std::size_t dimension() const { return parameters.size(); }
  Box bounds() const;
  /// Index of the named parameter; throws std::out_of_range if absent.
  std::size_t index_of(const std::string& name) const;
};

class InvalidSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invariant violations of the spec itself. Empty when valid.
std::vector<std::string> validate_spec(const ScenarioSpec& spec);

/// Bound violations of one input against the spec. Empty when valid.
std::vector<std::string> validate_input(const ScenarioSpec& spec, const TestInput& input);

/// Uniform samples inside `box`, drawn from `rng` in component order.
std::vector<TestInput> sample_uniform(const Box& box, std::size_t count, Rng& rng);

/// Deterministic function of (spec, count, seed). Throws InvalidSpecError.
std::vector<TestInput> sample_uniform(const ScenarioSpec& spec, std::size_t count,
                                      std::uint64_t seed);

std::vector<double> scale_to_unit(const Box& box, std::span<const double> values);
std::vector<double> unscale_from_unit(const Box& box, std::span<const double> unit);

inline std::vector<double> scale_to_unit(const ScenarioSpec& spec, const TestInput& input) {
  return scale_to_unit(spec.bounds(), input.values);
}
inline TestInput unscale_from_unit(const ScenarioSpec& spec, std::span<const double> unit) {
  return TestInput{unscale_from_unit(spec.bounds(), unit)};
}

/// True iff `inner` lies componentwise inside `outer`.
bool is_sub_box(const Box& inner, const Box& outer);
bool box_contains(const Box& box, std::span<const double> values);

}  // namespace sbt
