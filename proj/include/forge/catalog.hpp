#pragma once

#include "forge/pair.hpp"
#include "forge/verify.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace forge {

struct CatalogEntry {
  std::string name;
  std::string summary;
  int domain_dim = 2;
  int ambient_dim = 3;
  int default_resolution = 64;
  /// Expected clustered spectrum of T: (dim L+, dim L-, dim L_c).
  std::array<int, 3> rank_pattern{0, 0, 0};
  /// Whether the pattern must hold at every sampled node (otherwise only as
  /// the most frequent one).
  bool pattern_everywhere = true;
  /// Threshold constants C per residual: pass when residual <= C h^2.
  std::map<std::string, double> constants;
  double cluster_constant = 10.0;
  std::function<DeformationPair(int resolution)> build;

  VerifyOptions verify_options() const;
};

const std::vector<CatalogEntry>& catalog();
/// Throws UnknownExample.
const CatalogEntry& catalog_entry(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace forge
