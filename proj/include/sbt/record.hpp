#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sbt/scenario.hpp"

namespace sbt {

/// One simulated test case as it appears in the archive and in every CSV.
struct EvaluationRecord {
  std::size_t index = 0;
  TestInput input;
  std::vector<double> objectives;  // raw, user orientation (F1, F2, ...)
  bool critical = false;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;
};

}  // namespace sbt
