#include "sbt/scenario.hpp"

#include <fmt/format.h>

#include <set>

namespace sbt {

Box ScenarioSpec::bounds() const {
  Box box;
  box.reserve(parameters.size());
  for (const auto& p : parameters) box.push_back({p.lower, p.upper});
  return box;
}

std::size_t ScenarioSpec::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < parameters.size(); ++i)
    if (parameters[i].name == name) return i;
  throw std::out_of_range("unknown scenario parameter: " + name);
}

std::vector<std::string> validate_spec(const ScenarioSpec& spec) {
  std::vector<std::string> errors;
  if (spec.parameters.empty()) errors.emplace_back("no search parameters");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < spec.parameters.size(); ++i) {
    const auto& p = spec.parameters[i];
    if (p.name.empty()) errors.push_back(fmt::format("empty parameter name (index {})", i));
    if (!seen.insert(p.name).second)
      errors.push_back(fmt::format("duplicate parameter name '{}'", p.name));
    if (!(p.lower < p.upper)) {
      errors.push_back(p.lower == p.upper
                           ? fmt::format("degenerate bound (index {})", i)
                           : fmt::format("lower bound above upper bound (index {})", i));
    }
  }
  for (const auto& [key, value] : spec.fixed_settings) {
    if (seen.count(key)) errors.push_back(fmt::format("fixed setting '{}' shadows a parameter", key));
  }
  return errors;
}

std::vector<std::string> validate_input(const ScenarioSpec& spec, const TestInput& input) {
  std::vector<std::string> errors;
  if (input.values.size() != spec.parameters.size()) {
    errors.push_back(fmt::format("input has {} values, expected {}", input.values.size(),
                                 spec.parameters.size()));
    return errors;
  }
  for (std::size_t i = 0; i < input.values.size(); ++i) {
    const double v = input.values[i];
    if (v < spec.parameters[i].lower)
      errors.push_back(fmt::format("value below lower bound (index {})", i));
    else if (v > spec.parameters[i].upper)
      errors.push_back(fmt::format("value above upper bound (index {})", i));
    else if (v != v)
      errors.push_back(fmt::format("value is NaN (index {})", i));
  }
  return errors;
}

std::vector<TestInput> sample_uniform(const Box& box, std::size_t count, Rng& rng) {
  std::vector<TestInput> out(count);
  for (auto& input : out) {
    input.values.resize(box.size());
    for (std::size_t i = 0; i < box.size(); ++i)
      input.values[i] = box[i].clamp(rng.uniform(box[i].lower, box[i].upper));
  }
  return out;
}

std::vector<TestInput> sample_uniform(const ScenarioSpec& spec, std::size_t count,
                                      std::uint64_t seed) {
  if (auto errors = validate_spec(spec); !errors.empty())
    throw InvalidSpecError("invalid scenario spec: " + errors.front());
  if (count < 1) throw std::invalid_argument("sample_uniform: count must be >= 1");
  Rng rng(seed);
  return sample_uniform(spec.bounds(), count, rng);
}

std::vector<double> scale_to_unit(const Box& box, std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = (values[i] - box[i].lower) / box[i].width();
  return out;
}

std::vector<double> unscale_from_unit(const Box& box, std::span<const double> unit) {
  std::vector<double> out(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i)
    out[i] = box[i].lower + unit[i] * box[i].width();
  return out;
}

bool is_sub_box(const Box& inner, const Box& outer) {
  if (inner.size() != outer.size()) return false;
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (inner[i].lower < outer[i].lower || inner[i].upper > outer[i].upper) return false;
  return true;
}

bool box_contains(const Box& box, std::span<const double> values) {
  for (std::size_t i = 0; i < box.size(); ++i)
    if (!box[i].contains(values[i])) return false;
  return true;
}

}  // namespace sbt
