#pragma once

#include "forge/chart.hpp"

#include <map>
#include <string>
#include <vector>

namespace forge {

/// Two immersions over the same grid. Derived fields are produced by the
/// verify module; `info` carries construction diagnostics.
struct DeformationPair {
  std::string id;
  Chart f;
  Chart g;
  std::vector<int> fiber_axes;  // grid axes of sphere factors, if any
  std::map<std::string, double> info;
};

}  // namespace forge
